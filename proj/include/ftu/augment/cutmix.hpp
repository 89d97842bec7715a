#pragma once

#include <algorithm>
#include <cmath>

#include "ftu/augment/tile.hpp"

namespace ftu::augment {

/// Half-open pixel rectangle [x0, x1) x [y0, y1); may be empty.
struct Box {
    std::size_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool contains(std::size_t x, std::size_t y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    std::size_t area() const noexcept { return (x1 - x0) * (y1 - y0); }
};

enum class CutMixBoxLaw {
    uniform_corners,  // two x and two y edges drawn uniformly, then sorted
    fixed_area,       // box of area_ratio * tile area at a uniform position
};

struct CutMixOptions {
    CutMixBoxLaw law = CutMixBoxLaw::uniform_corners;
    double area_ratio = 0.25;
};

inline Box draw_cutmix_box(std::size_t w, std::size_t h, SeededRng& rng, const CutMixOptions& opt = {}) {
    if (opt.law == CutMixBoxLaw::fixed_area) {
        const double side = std::sqrt(std::clamp(opt.area_ratio, 0.0, 1.0));
        const auto bw = static_cast<std::size_t>(std::floor(w * side + 0.5));
        const auto bh = static_cast<std::size_t>(std::floor(h * side + 0.5));
        const auto x0 = static_cast<std::size_t>(rng.uniform_index(w - bw + 1));
        const auto y0 = static_cast<std::size_t>(rng.uniform_index(h - bh + 1));
        return {x0, y0, x0 + bw, y0 + bh};
    }
    auto a = static_cast<std::size_t>(rng.uniform_index(w + 1));
    auto b = static_cast<std::size_t>(rng.uniform_index(w + 1));
    auto c = static_cast<std::size_t>(rng.uniform_index(h + 1));
    auto d = static_cast<std::size_t>(rng.uniform_index(h + 1));
    return {std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
}

/// Pastes `b` into `a` inside `box` (image and mask alike). Keeps a's origin.
inline LabeledTile apply_cutmix(const LabeledTile& a, const LabeledTile& b, const Box& box) {
    if (a.organ != b.organ) {
        throw ContractError("cutmix across organs (" + std::string(to_string(a.organ)) + " vs " +
                            std::string(to_string(b.organ)) + ")");
    }
    if (!a.image.same_shape(b.image) || a.image.channels() != b.image.channels() || !a.mask.same_shape(b.mask) ||
        !a.image.same_shape(a.mask)) {
        throw ContractError("cutmix tiles must share dimensions");
    }
    if (box.x1 > a.image.width() || box.y1 > a.image.height() || box.x0 > box.x1 || box.y0 > box.y1) {
        throw ContractError("cutmix box outside tile");
    }
    LabeledTile out = a;
    const std::size_t c = a.image.channels();
    for (std::size_t y = box.y0; y < box.y1; ++y)
        for (std::size_t x = box.x0; x < box.x1; ++x) {
            for (std::size_t k = 0; k < c; ++k) out.image(x, y, k) = b.image(x, y, k);
            out.mask(x, y) = b.mask(x, y);
        }
    return out;
}

/// Same-organ CutMix with a randomly drawn box.
inline LabeledTile cutmix(const LabeledTile& a, const LabeledTile& b, SeededRng& rng, const CutMixOptions& opt = {}) {
    if (a.organ != b.organ) {
        throw ContractError("cutmix across organs (" + std::string(to_string(a.organ)) + " vs " +
                            std::string(to_string(b.organ)) + ")");
    }
    return apply_cutmix(a, b, draw_cutmix_box(a.image.width(), a.image.height(), rng, opt));
}

} // namespace ftu::augment
