#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ftu/color.hpp"
#include "ftu/core/geometry.hpp"
#include "ftu/core/raster.hpp"
#include "ftu/core/rng.hpp"

namespace ftu::augment {

struct ImageMask {
    ByteImage image;
    BinaryMask mask;
};

// Dihedral group D4 elements.
//   0 identity, 1 rot90 cw, 2 rot180, 3 rot270 cw,
//   4 horizontal flip, 5 vertical flip, 6 transpose, 7 anti-transpose
inline constexpr int kDihedralOrder = 8;

inline int dihedral_inverse(int element) {
    if (element < 0 || element >= kDihedralOrder) throw ContractError("dihedral element outside 0..7");
    if (element == 1) return 3;
    if (element == 3) return 1;
    return element;
}

template <typename R>
R dihedral(const R& in, int element) {
    switch (element) {
        case 0: return in;
        case 1: return rotate90_cw(in);
        case 2: return flip_vertical(flip_horizontal(in));
        case 3: return rotate90_cw(rotate90_cw(rotate90_cw(in)));
        case 4: return flip_horizontal(in);
        case 5: return flip_vertical(in);
        case 6: return transpose(in);
        case 7: return flip_vertical(flip_horizontal(transpose(in)));
        default: throw ContractError("dihedral element outside 0..7");
    }
}

inline ImageMask apply_dihedral(const ByteImage& image, const BinaryMask& mask, int element) {
    if (!image.same_shape(mask)) throw ContractError("apply_dihedral: image/mask dims differ");
    return {dihedral(image, element), dihedral(mask, element)};
}

namespace detail {

/// Bilinear sample at continuous pixel-index coordinates with reflect-101 border.
inline double sample_bilinear(const ByteImage& img, double fx, double fy, std::size_t c) {
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    const double tx = fx - x0f;
    const double ty = fy - y0f;
    const auto x0 = static_cast<std::ptrdiff_t>(x0f);
    const auto y0 = static_cast<std::ptrdiff_t>(y0f);
    const std::size_t xa = reflect_index(x0, img.width()), xb = reflect_index(x0 + 1, img.width());
    const std::size_t ya = reflect_index(y0, img.height()), yb = reflect_index(y0 + 1, img.height());
    const double top = (1 - tx) * img(xa, ya, c) + tx * img(xb, ya, c);
    const double bottom = (1 - tx) * img(xa, yb, c) + tx * img(xb, yb, c);
    return (1 - ty) * top + ty * bottom;
}

inline std::uint8_t sample_nearest(const BinaryMask& m, double fx, double fy) {
    const auto x = static_cast<std::ptrdiff_t>(std::floor(fx + 0.5));
    const auto y = static_cast<std::ptrdiff_t>(std::floor(fy + 0.5));
    return m(reflect_index(x, m.width()), reflect_index(y, m.height()));
}

/// Resamples image (bilinear) and mask (nearest) through `source_of(x, y)`,
/// which returns the source position in pixel-index coordinates.
template <typename F>
ImageMask warp(const ByteImage& image, const BinaryMask& mask, F&& source_of) {
    const std::size_t w = image.width(), h = image.height(), c = image.channels();
    std::vector<std::uint8_t> img(w * h * c), msk(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const auto [sx, sy] = source_of(x, y);
            for (std::size_t k = 0; k < c; ++k) {
                img[(y * w + x) * c + k] = ftu::detail::to_byte(sample_bilinear(image, sx, sy, k));
            }
            msk[y * w + x] = sample_nearest(mask, sx, sy);
        }
    }
    return {ByteImage(w, h, c, std::move(img)), BinaryMask(w, h, 1, std::move(msk))};
}

} // namespace detail

struct AffineRanges {
    Range scale{1.0, 1.0};          // zoom factor
    Range shift{0.0, 0.0};          // fraction of width/height
    Range rotate_degrees{0.0, 0.0}; // clockwise in image coordinates
};

struct AffineDraw {
    double scale = 1.0, shift_x = 0.0, shift_y = 0.0, degrees = 0.0;
    bool identity() const noexcept { return scale == 1.0 && shift_x == 0.0 && shift_y == 0.0 && degrees == 0.0; }
};

/// One composed scale/shift/rotation about the image centre.
inline ImageMask affine_warp(const ByteImage& image, const BinaryMask& mask, const AffineDraw& d) {
    if (!image.same_shape(mask)) throw ContractError("affine: image/mask dims differ");
    if (d.identity()) return {image, mask};
    if (!(d.scale > 0.0)) throw ContractError("affine: scale must be positive");
    const double cx = image.width() / 2.0;
    const double cy = image.height() / 2.0;
    const double rad = d.degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    const double tx = d.shift_x * image.width(), ty = d.shift_y * image.height();
    return detail::warp(image, mask, [&](std::size_t x, std::size_t y) {
        // Output pixel centre -> centred coords -> inverse transform -> source pixel index.
        const double u = (x + 0.5) - cx - tx;
        const double v = (y + 0.5) - cy - ty;
        const double su = (cs * u + sn * v) / d.scale;
        const double sv = (-sn * u + cs * v) / d.scale;
        return std::pair{su + cx - 0.5, sv + cy - 0.5};
    });
}

inline ImageMask affine_jitter(const ByteImage& image, const BinaryMask& mask, const AffineRanges& ranges,
                               SeededRng& rng) {
    AffineDraw d;
    d.scale = rng.uniform(ranges.scale.lo, ranges.scale.hi);
    d.shift_x = rng.uniform(ranges.shift.lo, ranges.shift.hi);
    d.shift_y = rng.uniform(ranges.shift.lo, ranges.shift.hi);
    d.degrees = rng.uniform(ranges.rotate_degrees.lo, ranges.rotate_degrees.hi);
    return affine_warp(image, mask, d);
}

/// Separable Gaussian blur of a float field, reflect-101 border.
inline std::vector<double> gaussian_blur(const std::vector<double>& f, std::size_t w, std::size_t h, double sigma) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double norm = 0.0;
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        norm += k[i + radius];
    }
    for (double& v : k) v /= norm;
    std::vector<double> tmp(f.size()), out(f.size());
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::ptrdiff_t i = -radius; i <= radius; ++i)
                s += k[i + radius] * f[y * w + reflect_index(static_cast<std::ptrdiff_t>(x) + i, w)];
            tmp[y * w + x] = s;
        }
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::ptrdiff_t i = -radius; i <= radius; ++i)
                s += k[i + radius] * tmp[reflect_index(static_cast<std::ptrdiff_t>(y) + i, h) * w + x];
            out[y * w + x] = s;
        }
    return out;
}

/// Random displacement field: uniform(-1, 1) noise per pixel and axis,
/// Gaussian-smoothed with `sigma`, scaled by `alpha` pixels.
inline ImageMask elastic_transform(const ByteImage& image, const BinaryMask& mask, double alpha, double sigma,
                                   SeededRng& rng) {
    if (!image.same_shape(mask)) throw ContractError("elastic: image/mask dims differ");
    if (alpha < 0.0 || !(sigma > 0.0)) throw ContractError("elastic: need alpha >= 0 and sigma > 0");
    const std::size_t w = image.width(), h = image.height();
    std::vector<double> dx(w * h), dy(w * h);
    for (auto& v : dx) v = rng.uniform(-1.0, 1.0);
    for (auto& v : dy) v = rng.uniform(-1.0, 1.0);
    if (alpha == 0.0) return {image, mask};
    dx = gaussian_blur(dx, w, h, sigma);
    dy = gaussian_blur(dy, w, h, sigma);
    return detail::warp(image, mask, [&](std::size_t x, std::size_t y) {
        const std::size_t i = y * w + x;
        return std::pair{x + alpha * dx[i], y + alpha * dy[i]};
    });
}

} // namespace ftu::augment
