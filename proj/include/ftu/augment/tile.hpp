#pragma once

#include <algorithm>
#include <string>

#include "ftu/core/errors.hpp"
#include "ftu/core/geometry.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/raster.hpp"
#include "ftu/core/rng.hpp"

namespace ftu::augment {

struct TileOrigin {
    std::string sample_id;
    std::size_t x = 0;
    std::size_t y = 0;
    friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct LabeledTile {
    ByteImage image;
    BinaryMask mask;
    Organ organ = Organ::kidney;
    TileOrigin origin;
};

/// Crops a size x size training tile. With probability p_nonempty (and a
/// non-empty mask) the crop is centred on a uniformly drawn foreground pixel,
/// clamped to the image; otherwise the crop position is uniform. Rasters
/// smaller than `size` are reflection-padded first.
inline LabeledTile sample_tile(const ByteImage& image, const BinaryMask& mask, Organ organ, std::string sample_id,
                               std::size_t size, double p_nonempty, SeededRng& rng) {
    if (!image.same_shape(mask)) throw ContractError("sample_tile: image/mask dims differ");
    if (size == 0) throw ContractError("sample_tile: zero tile size");
    const std::size_t w = std::max(size, image.width());
    const std::size_t h = std::max(size, image.height());
    const ByteImage img = pad_reflect(image, w, h);
    const BinaryMask msk = pad_reflect(mask, w, h);

    const bool centred = rng.bernoulli(p_nonempty);
    const std::uint64_t pick = rng.next_u64();
    std::size_t x0, y0;
    const std::size_t fg = foreground_count(msk);
    if (centred && fg > 0) {
        std::size_t target = static_cast<std::size_t>(pick % fg);
        std::size_t fx = 0, fy = 0;
        for (std::size_t i = 0; i < msk.pixel_count(); ++i) {
            if (msk.data()[i] && target-- == 0) {
                fx = i % w;
                fy = i / w;
                break;
            }
        }
        const auto clamp_origin = [size](std::size_t centre, std::size_t dim) {
            const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(centre) - static_cast<std::ptrdiff_t>(size / 2);
            return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(o, 0, static_cast<std::ptrdiff_t>(dim - size)));
        };
        x0 = clamp_origin(fx, w);
        y0 = clamp_origin(fy, h);
    } else {
        x0 = static_cast<std::size_t>(rng.uniform_index(w - size + 1));
        y0 = static_cast<std::size_t>(rng.uniform_index(h - size + 1));
    }
    return {crop(img, x0, y0, size, size), crop(msk, x0, y0, size, size), organ, {std::move(sample_id), x0, y0}};
}

} // namespace ftu::augment
