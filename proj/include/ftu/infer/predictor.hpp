#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

namespace ftu::infer {

/// A tile-to-probability model. Implementations must return a ProbMap with the
/// tile's width and height, be deterministic per tile, and be callable from
/// several threads at once.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual ProbMap predict(const ByteImage& tile) const = 0;

    /// Batched entry point; external predictors override it to amortize the
    /// round trip.
    virtual std::vector<ProbMap> predict_batch(std::span<const ByteImage> tiles) const {
        std::vector<ProbMap> out;
        out.reserve(tiles.size());
        for (const ByteImage& t : tiles) out.push_back(predict(t));
        return out;
    }

    virtual std::string name() const = 0;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

/// Same value everywhere.
class ConstantPredictor final : public Predictor {
public:
    explicit ConstantPredictor(float value) : value_(value) {
        if (!(value >= 0.0f && value <= 1.0f)) throw ConfigError("constant predictor value outside [0,1]");
    }
    ProbMap predict(const ByteImage& tile) const override {
        return ProbMap(tile.width(), tile.height(), 1, value_);
    }
    std::string name() const override { return "constant:" + std::to_string(value_); }

private:
    float value_;
};

/// Returns one input channel scaled to [0,1] as v / 255 (green for RGB,
/// the only channel for gray).
class ChannelIdentityPredictor final : public Predictor {
public:
    ProbMap predict(const ByteImage& tile) const override {
        const std::size_t c = tile.channels();
        const std::size_t k = c == 3 ? 1 : 0;
        std::vector<float> out(tile.pixel_count());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<float>(tile.data()[i * c + k]) / 255.0f;
        }
        return ProbMap(tile.width(), tile.height(), 1, std::move(out));
    }
    std::string name() const override { return "identity"; }
};

/// sigmoid(gain * (bias - luminance)), luminance in [0,1] (Rec. 601 weights).
/// Dark (stained) tissue scores high.
class LuminanceSigmoidPredictor final : public Predictor {
public:
    LuminanceSigmoidPredictor(double gain = 10.0, double bias = 0.5) : gain_(gain), bias_(bias) {}

    ProbMap predict(const ByteImage& tile) const override {
        const std::size_t c = tile.channels();
        std::vector<float> out(tile.pixel_count());
        const auto d = tile.data();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double lum = c == 3 ? (0.299 * d[i * 3] + 0.587 * d[i * 3 + 1] + 0.114 * d[i * 3 + 2]) / 255.0
                                      : d[i] / 255.0;
            out[i] = static_cast<float>(1.0 / (1.0 + std::exp(-gain_ * (bias_ - lum))));
        }
        return ProbMap(tile.width(), tile.height(), 1, std::move(out));
    }
    std::string name() const override { return "luminance-sigmoid"; }

private:
    double gain_;
    double bias_;
};

namespace detail {
inline std::vector<std::string> split_colon(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = s.find(':', start);
        parts.push_back(s.substr(start, p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return parts;
}

inline double parse_number(const std::string& s, const std::string& spec) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + s + "' in predictor spec '" + spec + "'");
    }
}
} // namespace detail

/// Builds an in-process reference predictor from `constant:<p>`, `identity`,
/// or `luminance-sigmoid[:<gain>[:<bias>]]`.
inline PredictorPtr make_reference_predictor(const std::string& spec) {
    const auto parts = detail::split_colon(spec);
    const std::string& kind = parts[0];
    if (kind == "constant" && parts.size() == 2) {
        return std::make_shared<ConstantPredictor>(static_cast<float>(detail::parse_number(parts[1], spec)));
    }
    if (kind == "identity" && parts.size() == 1) {
        return std::make_shared<ChannelIdentityPredictor>();
    }
    if (kind == "luminance-sigmoid" && parts.size() <= 3) {
        const double gain = parts.size() > 1 ? detail::parse_number(parts[1], spec) : 10.0;
        const double bias = parts.size() > 2 ? detail::parse_number(parts[2], spec) : 0.5;
        return std::make_shared<LuminanceSigmoidPredictor>(gain, bias);
    }
    throw ConfigError("unknown reference predictor '" + spec + "'");
}

} // namespace ftu::infer
