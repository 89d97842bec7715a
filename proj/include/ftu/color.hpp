#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"
#include "ftu/core/rng.hpp"

namespace ftu {

using ChannelHistogram = std::array<std::uint64_t, 256>;

/// Cumulative frequencies, cdf[v] = P(value <= v). cdf[255] == 1.
struct ChannelCdf {
    std::array<double, 256> cdf{};
};

inline ChannelHistogram cumulative_counts(const ByteImage& image, std::size_t channel) {
    if (channel >= image.channels()) {
        throw ContractError("channel " + std::to_string(channel) + " out of range for " +
                            std::to_string(image.channels()) + "-channel image");
    }
    ChannelHistogram counts{};
    const std::size_t c = image.channels();
    const auto data = image.data();
    for (std::size_t i = channel; i < data.size(); i += c) ++counts[data[i]];
    for (std::size_t v = 1; v < 256; ++v) counts[v] += counts[v - 1];
    return counts;
}

inline ChannelCdf channel_cdf(const ByteImage& image, std::size_t channel) {
    const ChannelHistogram cum = cumulative_counts(image, channel);
    const double n = static_cast<double>(image.pixel_count());
    ChannelCdf out;
    for (std::size_t v = 0; v < 256; ++v) out.cdf[v] = static_cast<double>(cum[v]) / n;
    out.cdf[255] = 1.0;
    return out;
}

/// Per-channel lookup table mapping source values onto reference values: each
/// v goes to the smallest r with ref_cdf[r] >= src_cdf[v]. CDF comparisons are
/// done on integer counts so there is no floating-point tie ambiguity.
inline std::array<std::uint8_t, 256> histogram_match_lut(const ByteImage& source,
                                                         const ByteImage& reference,
                                                         std::size_t channel) {
    const ChannelHistogram src = cumulative_counts(source, channel);
    const ChannelHistogram ref = cumulative_counts(reference, channel);
    const std::uint64_t ns = source.pixel_count();
    const std::uint64_t nr = reference.pixel_count();
    std::array<std::uint8_t, 256> lut{};
    std::size_t r = 0;
    for (std::size_t v = 0; v < 256; ++v) {
        // src[v] is non-decreasing, so r only moves forward.
        while (r < 255 && ref[r] * ns < src[v] * nr) ++r;
        lut[v] = static_cast<std::uint8_t>(r);
    }
    return lut;
}

inline ByteImage histogram_match(const ByteImage& source, const ByteImage& reference) {
    if (source.channels() != reference.channels()) {
        throw ContractError("histogram_match: channel mismatch (" + std::to_string(source.channels()) +
                            " vs " + std::to_string(reference.channels()) + ")");
    }
    const std::size_t c = source.channels();
    std::vector<std::uint8_t> out(source.data().begin(), source.data().end());
    for (std::size_t k = 0; k < c; ++k) {
        const auto lut = histogram_match_lut(source, reference, k);
        for (std::size_t i = k; i < out.size(); i += c) out[i] = lut[out[i]];
    }
    return rebuild_like(source, std::move(out));
}

/// Reference images (typically HuBMAP/GTEX tiles) drawn uniformly per sample.
struct ReferencePool {
    std::vector<std::string> ids;
    std::vector<ByteImage> images;

    bool empty() const noexcept { return images.empty(); }
    void add(std::string id, ByteImage image) {
        ids.push_back(std::move(id));
        images.push_back(std::move(image));
    }
};

struct MatchResult {
    ByteImage image;
    std::optional<std::string> reference_id;
};

/// With `probability`, matches against one uniformly drawn reference of the
/// same channel count. Always consumes two draws so stream position does not
/// depend on the outcome.
inline MatchResult maybe_histogram_match(const ByteImage& image, const ReferencePool& pool,
                                         double probability, SeededRng& rng) {
    const bool apply = rng.bernoulli(probability);
    const std::uint64_t pick = rng.next_u64();
    if (!apply || pool.empty()) return {image, std::nullopt};
    const std::size_t idx = static_cast<std::size_t>(pick % pool.images.size());
    return {histogram_match(image, pool.images[idx]), pool.ids[idx]};
}

struct Range {
    double lo = 1.0;
    double hi = 1.0;
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool is_point(double v) const noexcept { return lo == v && hi == v; }
};

struct ColorJitterParams {
    double hue_shift_degrees = 20.0;  // shift drawn from [-h, +h]
    Range saturation{0.7, 1.3};
    Range value{0.7, 1.3};
    Range contrast{0.7, 1.3};
    Range gamma{0.7, 1.5};
    double apply_probability = 0.5;

    static ColorJitterParams identity() {
        return {0.0, {1, 1}, {1, 1}, {1, 1}, {1, 1}, 0.5};
    }

    void validate() const {
        if (hue_shift_degrees < 0.0 || !saturation.contains(1.0) || !value.contains(1.0) ||
            !contrast.contains(1.0) || !gamma.contains(1.0) || gamma.lo <= 0.0) {
            throw ConfigError("color jitter ranges must contain their identity element");
        }
        if (!(apply_probability >= 0.0 && apply_probability <= 1.0)) {
            throw ConfigError("color jitter apply_probability outside [0,1]");
        }
    }
};

namespace detail {

struct Hsv {
    double h, s, v;  // h in [0,360), s,v in [0,1]
};

inline Hsv rgb_to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == r) {
            h = 60.0 * std::fmod((g - b) / d, 6.0);
        } else if (mx == g) {
            h = 60.0 * ((b - r) / d + 2.0);
        } else {
            h = 60.0 * ((r - g) / d + 4.0);
        }
        if (h < 0.0) h += 360.0;
    }
    return {h, mx > 0.0 ? d / mx : 0.0, mx};
}

inline std::array<double, 3> hsv_to_rgb(Hsv p) {
    const double c = p.v * p.s;
    const double hp = std::fmod(p.h, 360.0) / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = p.v - c;
    return {r + m, g + m, b + m};
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

} // namespace detail

/// out = clamp(mean + c * (in - mean)), mean over all samples of the image.
inline ByteImage adjust_contrast(const ByteImage& image, double c) {
    if (c == 1.0) return image;
    double sum = 0.0;
    for (auto v : image.data()) sum += v;
    const double mean = sum / static_cast<double>(image.data().size());
    std::vector<std::uint8_t> out(image.data().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::to_byte(mean + c * (image.data()[i] - mean));
    return rebuild_like(image, std::move(out));
}

/// out = 255 * (in / 255)^gamma.
inline ByteImage adjust_gamma(const ByteImage& image, double gamma) {
    if (gamma == 1.0) return image;
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) lut[v] = detail::to_byte(255.0 * std::pow(v / 255.0, gamma));
    std::vector<std::uint8_t> out(image.data().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lut[image.data()[i]];
    return rebuild_like(image, std::move(out));
}

/// Hue rotation (degrees) and saturation/value multipliers. On 1-channel input
/// only the value multiplier is meaningful.
inline ByteImage adjust_hsv(const ByteImage& image, double hue_shift, double sat_mul, double val_mul) {
    if (hue_shift == 0.0 && sat_mul == 1.0 && val_mul == 1.0) return image;
    if (image.channels() == 1) {
        if (hue_shift != 0.0 || sat_mul != 1.0) {
            throw ContractError("hue/saturation jitter requires a 3-channel image");
        }
        std::vector<std::uint8_t> out(image.data().size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::to_byte(image.data()[i] * val_mul);
        return rebuild_like(image, std::move(out));
    }
    std::vector<std::uint8_t> out(image.data().size());
    const auto in = image.data();
    for (std::size_t i = 0; i < in.size(); i += 3) {
        detail::Hsv p = detail::rgb_to_hsv(in[i] / 255.0, in[i + 1] / 255.0, in[i + 2] / 255.0);
        p.h = std::fmod(p.h + hue_shift + 360.0, 360.0);
        p.s = std::clamp(p.s * sat_mul, 0.0, 1.0);
        p.v = std::clamp(p.v * val_mul, 0.0, 1.0);
        const auto rgb = detail::hsv_to_rgb(p);
        for (int k = 0; k < 3; ++k) out[i + k] = detail::to_byte(rgb[k] * 255.0);
    }
    return rebuild_like(image, std::move(out));
}

/// Randomized HSV, contrast and gamma adjustment. Each sub-transform fires
/// independently with `apply_probability`. The number of draws is fixed, so a
/// given stream always yields the same sequence of decisions.
inline ByteImage color_jitter(const ByteImage& image, const ColorJitterParams& params, SeededRng& rng) {
    params.validate();
    const bool do_hsv = rng.bernoulli(params.apply_probability);
    const double hue = rng.uniform(-params.hue_shift_degrees, params.hue_shift_degrees);
    const double sat = rng.uniform(params.saturation.lo, params.saturation.hi);
    const double val = rng.uniform(params.value.lo, params.value.hi);
    const bool do_contrast = rng.bernoulli(params.apply_probability);
    const double con = rng.uniform(params.contrast.lo, params.contrast.hi);
    const bool do_gamma = rng.bernoulli(params.apply_probability);
    const double gam = rng.uniform(params.gamma.lo, params.gamma.hi);

    if (image.channels() == 1 && (params.hue_shift_degrees != 0.0 || !params.saturation.is_point(1.0))) {
        throw ContractError("hue/saturation jitter requested on a 1-channel image");
    }

    ByteImage out = image;
    if (do_hsv) out = adjust_hsv(out, hue, sat, val);
    if (do_contrast) out = adjust_contrast(out, con);
    if (do_gamma) out = adjust_gamma(out, gam);
    return out;
}

} // namespace ftu
