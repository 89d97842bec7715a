#pragma once

#include <optional>
#include <string>

#include "ftu/augment/cutmix.hpp"
#include "ftu/augment/geometric.hpp"
#include "ftu/augment/tile.hpp"
#include "ftu/color.hpp"

namespace ftu::augment {

struct TilePipelineConfig {
    std::size_t tile_size = 512;
    double p_nonempty = 0.5;
    double dihedral_probability = 1.0;  // uniform D4 element when applied
    AffineRanges affine{{0.8, 1.2}, {-0.1, 0.1}, {-30.0, 30.0}};
    double affine_probability = 0.5;
    double elastic_alpha = 30.0;
    double elastic_sigma = 6.0;
    double elastic_probability = 0.25;
    double match_probability = 0.5;
    ColorJitterParams jitter;
    double cutmix_probability = 0.5;
    CutMixOptions cutmix;
};

struct SourceSample {
    const ByteImage* image;
    const BinaryMask* mask;
    Organ organ;
    std::string id;
};

/// Crop, geometry, color, in that order, for a single sample.
inline LabeledTile augment_single(const SourceSample& s, const ReferencePool& references,
                                  const TilePipelineConfig& cfg, SeededRng& rng) {
    LabeledTile t = sample_tile(*s.image, *s.mask, s.organ, s.id, cfg.tile_size, cfg.p_nonempty, rng);

    const bool flip = rng.bernoulli(cfg.dihedral_probability);
    const int element = static_cast<int>(rng.uniform_index(kDihedralOrder));
    if (flip) {
        auto r = apply_dihedral(t.image, t.mask, element);
        t.image = std::move(r.image);
        t.mask = std::move(r.mask);
    }
    SeededRng affine_rng = rng.split("affine");
    if (rng.bernoulli(cfg.affine_probability)) {
        auto r = affine_jitter(t.image, t.mask, cfg.affine, affine_rng);
        t.image = std::move(r.image);
        t.mask = std::move(r.mask);
    }
    SeededRng elastic_rng = rng.split("elastic");
    if (rng.bernoulli(cfg.elastic_probability)) {
        auto r = elastic_transform(t.image, t.mask, cfg.elastic_alpha, cfg.elastic_sigma, elastic_rng);
        t.image = std::move(r.image);
        t.mask = std::move(r.mask);
    }
    t.image = maybe_histogram_match(t.image, references, cfg.match_probability, rng).image;
    if (t.image.channels() == 3 || (cfg.jitter.hue_shift_degrees == 0.0 && cfg.jitter.saturation.is_point(1.0))) {
        t.image = color_jitter(t.image, cfg.jitter, rng);
    }
    return t;
}

/// Full training-tile path. CutMix runs last, against an independently
/// augmented tile from a same-organ partner.
inline LabeledTile make_training_tile(const SourceSample& primary, const std::optional<SourceSample>& partner,
                                      const ReferencePool& references, const TilePipelineConfig& cfg,
                                      SeededRng& rng) {
    SeededRng primary_rng = rng.split("primary");
    SeededRng partner_rng = rng.split("partner");
    LabeledTile tile = augment_single(primary, references, cfg, primary_rng);
    const bool mix = rng.bernoulli(cfg.cutmix_probability);
    if (mix && partner && partner->organ == primary.organ) {
        const LabeledTile other = augment_single(*partner, references, cfg, partner_rng);
        tile = cutmix(tile, other, rng, cfg.cutmix);
    }
    return tile;
}

} // namespace ftu::augment
