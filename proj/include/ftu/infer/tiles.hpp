#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ftu/core/errors.hpp"

namespace ftu::infer {

struct TileOffset {
    std::size_t x = 0;
    std::size_t y = 0;
    friend bool operator==(const TileOffset&, const TileOffset&) = default;
};

/// Sliding-window layout. Offsets refer to the (possibly padded) canvas of
/// padded_width x padded_height; canvas dims exceed the image only along axes
/// shorter than the window, where the image is reflection-padded.
struct TileGrid {
    std::size_t window = 0;
    std::size_t stride = 0;
    std::size_t image_width = 0;
    std::size_t image_height = 0;
    std::size_t padded_width = 0;
    std::size_t padded_height = 0;
    std::vector<std::size_t> xs;
    std::vector<std::size_t> ys;

    /// Canonical order: row-major over (y, x).
    std::vector<TileOffset> offsets() const {
        std::vector<TileOffset> out;
        out.reserve(xs.size() * ys.size());
        for (std::size_t y : ys)
            for (std::size_t x : xs) out.push_back({x, y});
        return out;
    }
    std::size_t tile_count() const noexcept { return xs.size() * ys.size(); }
    bool padded() const noexcept { return padded_width != image_width || padded_height != image_height; }
};

/// Window origins along one axis: min(i * stride, dim - window), ascending and
/// de-duplicated, so the last window is flush with the edge.
inline std::vector<std::size_t> axis_offsets(std::size_t dim, std::size_t window, std::size_t stride) {
    std::vector<std::size_t> v;
    const std::size_t last = dim - window;
    for (std::size_t pos = 0;; pos += stride) {
        const std::size_t o = std::min(pos, last);
        if (v.empty() || v.back() != o) v.push_back(o);
        if (o == last) break;
    }
    return v;
}

inline std::size_t window_stride(std::size_t window, double overlap) {
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw ContractError("tile overlap must lie in [0, 1)");
    }
    const double s = std::floor(static_cast<double>(window) * (1.0 - overlap) + 0.5);
    return std::max<std::size_t>(1, static_cast<std::size_t>(s));
}

inline TileGrid plan_tiles(std::size_t width, std::size_t height, std::size_t window, double overlap) {
    if (window == 0) throw ContractError("tile window must be positive");
    if (width == 0 || height == 0) throw ContractError("cannot tile an empty image");
    TileGrid g;
    g.window = window;
    g.stride = window_stride(window, overlap);
    g.image_width = width;
    g.image_height = height;
    g.padded_width = std::max(width, window);
    g.padded_height = std::max(height, window);
    g.xs = axis_offsets(g.padded_width, window, g.stride);
    g.ys = axis_offsets(g.padded_height, window, g.stride);
    return g;
}

/// Number of windows covering each canvas pixel, row-major over the padded canvas.
inline std::vector<std::uint32_t> cover_counts(const TileGrid& g) {
    // Separable: count(x, y) = count_x(x) * count_y(y).
    std::vector<std::uint32_t> cx(g.padded_width, 0), cy(g.padded_height, 0);
    for (std::size_t x0 : g.xs)
        for (std::size_t x = x0; x < x0 + g.window; ++x) ++cx[x];
    for (std::size_t y0 : g.ys)
        for (std::size_t y = y0; y < y0 + g.window; ++y) ++cy[y];
    std::vector<std::uint32_t> out(g.padded_width * g.padded_height);
    for (std::size_t y = 0; y < g.padded_height; ++y)
        for (std::size_t x = 0; x < g.padded_width; ++x) out[y * g.padded_width + x] = cx[x] * cy[y];
    return out;
}

} // namespace ftu::infer
