#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "ftu/core/geometry.hpp"
#include "ftu/core/raster.hpp"

namespace ftu::infer {

using PredictFn = std::function<ProbMap(const ByteImage&)>;

enum class Flip { none, horizontal, vertical, both };

inline constexpr std::array<Flip, 4> kTtaFlips = {Flip::none, Flip::horizontal, Flip::vertical, Flip::both};

/// Every axis flip is its own inverse.
template <typename R>
R apply_flip(const R& in, Flip f) {
    switch (f) {
        case Flip::none: return in;
        case Flip::horizontal: return flip_horizontal(in);
        case Flip::vertical: return flip_vertical(in);
        case Flip::both: return flip_vertical(flip_horizontal(in));
    }
    return in;
}

/// Mean over the identity and three flips; each flipped prediction is flipped
/// back before averaging.
inline ProbMap tta_predict(const ByteImage& image, const PredictFn& predict) {
    std::vector<double> acc(image.pixel_count(), 0.0);
    for (Flip f : kTtaFlips) {
        const ProbMap p = apply_flip(predict(apply_flip(image, f)), f);
        if (!p.same_shape(image)) throw ContractError("tta: prediction dims differ from input dims");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p.data()[i];
    }
    std::vector<float> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / 4.0);
    return ProbMap(image.width(), image.height(), 1, std::move(out));
}

} // namespace ftu::infer
