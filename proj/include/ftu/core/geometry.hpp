#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

namespace ftu {

/// Mirror index into [0, n) without repeating the edge sample (reflect-101),
/// periodic for arbitrarily distant indices.
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * (static_cast<std::ptrdiff_t>(n) - 1);
    std::ptrdiff_t m = i % period;
    if (m < 0) m += period;
    if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
    return static_cast<std::size_t>(m);
}

/// Generic pixel remap: out(x, y) = in(src_x(x, y), src_y(x, y)).
template <typename R, typename F>
R remap_pixels(const R& in, std::size_t out_w, std::size_t out_h, F&& source_of) {
    const std::size_t c = in.channels();
    std::vector<typename R::value_type> data(out_w * out_h * c);
    for (std::size_t y = 0; y < out_h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            const auto [sx, sy] = source_of(x, y);
            for (std::size_t k = 0; k < c; ++k) data[(y * out_w + x) * c + k] = in(sx, sy, k);
        }
    }
    return R(out_w, out_h, c, std::move(data));
}

template <typename R>
R flip_horizontal(const R& in) {
    const std::size_t w = in.width();
    return remap_pixels(in, w, in.height(), [w](std::size_t x, std::size_t y) {
        return std::pair{w - 1 - x, y};
    });
}

template <typename R>
R flip_vertical(const R& in) {
    const std::size_t h = in.height();
    return remap_pixels(in, in.width(), h, [h](std::size_t x, std::size_t y) {
        return std::pair{x, h - 1 - y};
    });
}

/// Clockwise quarter turn: [[a,b],[c,d]] -> [[c,a],[d,b]].
template <typename R>
R rotate90_cw(const R& in) {
    const std::size_t h = in.height();
    return remap_pixels(in, h, in.width(), [h](std::size_t x, std::size_t y) {
        return std::pair{y, h - 1 - x};
    });
}

template <typename R>
R transpose(const R& in) {
    return remap_pixels(in, in.height(), in.width(), [](std::size_t x, std::size_t y) {
        return std::pair{y, x};
    });
}

template <typename R>
R crop(const R& in, std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) {
    if (x0 + w > in.width() || y0 + h > in.height()) {
        throw ContractError("crop window outside raster");
    }
    return remap_pixels(in, w, h, [x0, y0](std::size_t x, std::size_t y) {
        return std::pair{x0 + x, y0 + y};
    });
}

/// Extends the raster to (w, h) by mirroring past the right and bottom edges.
template <typename R>
R pad_reflect(const R& in, std::size_t w, std::size_t h) {
    if (w < in.width() || h < in.height()) throw ContractError("pad_reflect cannot shrink");
    if (w == in.width() && h == in.height()) return in;
    const std::size_t iw = in.width();
    const std::size_t ih = in.height();
    return remap_pixels(in, w, h, [iw, ih](std::size_t x, std::size_t y) {
        return std::pair{reflect_index(static_cast<std::ptrdiff_t>(x), iw),
                         reflect_index(static_cast<std::ptrdiff_t>(y), ih)};
    });
}

} // namespace ftu
