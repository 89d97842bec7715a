#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

namespace ftu::infer {

/// Weighted mean of probability maps (uniform when `weights` is empty).
inline ProbMap ensemble(std::span<const ProbMap> maps, std::span<const double> weights = {}) {
    if (maps.empty()) throw ContractError("ensemble of zero maps");
    if (!weights.empty() && weights.size() != maps.size()) {
        throw ContractError("ensemble: " + std::to_string(weights.size()) + " weights for " +
                            std::to_string(maps.size()) + " maps");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        if (!maps[k].same_shape(maps[0])) throw ContractError("ensemble: map dims differ");
        const double w = weights.empty() ? 1.0 : weights[k];
        if (!(w >= 0.0)) throw ContractError("ensemble: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw ContractError("ensemble: weights sum to zero");

    std::vector<double> acc(maps[0].pixel_count(), 0.0);
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        const auto d = maps[k].data();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * d[i];
    }
    std::vector<float> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        out[i] = std::min(1.0f, std::max(0.0f, static_cast<float>(acc[i] / total)));
    }
    return ProbMap(maps[0].width(), maps[0].height(), 1, std::move(out));
}

} // namespace ftu::infer
