#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/raster.hpp"

namespace ftu {

enum class Connectivity { four = 4, eight = 8 };

struct OrganPost {
    double min_region_ratio = 0.0;
    double threshold = 0.5;
    Connectivity connectivity = Connectivity::eight;
    friend bool operator==(const OrganPost&, const OrganPost&) = default;
};

/// Per-organ thresholds for the small-region filter. Defaults are the
/// published relative minimum region areas.
struct OrganPostConfig {
    std::map<Organ, OrganPost> organs;

    static OrganPostConfig defaults() {
        OrganPostConfig c;
        c.organs[Organ::kidney] = {0.001};
        c.organs[Organ::prostate] = {0.0005};
        c.organs[Organ::large_intestine] = {0.0001};
        c.organs[Organ::spleen] = {0.001};
        c.organs[Organ::lung] = {0.000001};
        return c;
    }

    const OrganPost& at(Organ organ) const {
        const auto it = organs.find(organ);
        if (it == organs.end()) {
            throw ConfigError("no post-processing configuration for organ " + std::string(to_string(organ)));
        }
        return it->second;
    }
};

/// pixel = 1 iff probability >= threshold.
inline BinaryMask binarize(const ProbMap& map, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw ContractError("threshold outside [0,1]");
    std::vector<std::uint8_t> bits(map.pixel_count());
    const auto d = map.data();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = d[i] >= threshold ? 1 : 0;
    return BinaryMask(map.width(), map.height(), 1, std::move(bits));
}

/// labels[i] == 0 for background, otherwise the region id in 1..areas.size().
/// Ids are numbered by first appearance in row-major scan order.
struct Labeling {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint32_t> labels;
    std::vector<std::size_t> areas;  // areas[id - 1]

    std::size_t region_count() const noexcept { return areas.size(); }
};

namespace detail {
inline std::uint32_t uf_find(std::vector<std::uint32_t>& parent, std::uint32_t a) {
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return a;
}
inline void uf_union(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
    a = uf_find(parent, a);
    b = uf_find(parent, b);
    if (a == b) return;
    if (a < b) parent[b] = a; else parent[a] = b;
}
} // namespace detail

/// Two-pass union-find labeling.
inline Labeling connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::eight) {
    const std::size_t w = mask.width();
    const std::size_t h = mask.height();
    Labeling out{w, h, std::vector<std::uint32_t>(w * h, 0), {}};
    std::vector<std::uint32_t> parent{0};  // provisional label 0 unused
    const bool diag = connectivity == Connectivity::eight;

    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (!mask(x, y)) continue;
            std::uint32_t neighbours[4];
            int n = 0;
            auto take = [&](std::size_t nx, std::size_t ny) {
                const std::uint32_t l = out.labels[ny * w + nx];
                if (l) neighbours[n++] = l;
            };
            if (x > 0) take(x - 1, y);
            if (y > 0) {
                take(x, y - 1);
                if (diag && x > 0) take(x - 1, y - 1);
                if (diag && x + 1 < w) take(x + 1, y - 1);
            }
            std::uint32_t label;
            if (n == 0) {
                label = static_cast<std::uint32_t>(parent.size());
                parent.push_back(label);
            } else {
                label = neighbours[0];
                for (int k = 1; k < n; ++k) label = std::min(label, neighbours[k]);
                for (int k = 0; k < n; ++k) detail::uf_union(parent, label, neighbours[k]);
            }
            out.labels[y * w + x] = label;
        }
    }

    std::vector<std::uint32_t> final_id(parent.size(), 0);
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        std::uint32_t& l = out.labels[i];
        if (!l) continue;
        const std::uint32_t root = detail::uf_find(parent, l);
        if (!final_id[root]) {
            out.areas.push_back(0);
            final_id[root] = static_cast<std::uint32_t>(out.areas.size());
        }
        l = final_id[root];
        ++out.areas[l - 1];
    }
    return out;
}

/// Zeroes every region whose area / image area is strictly below the organ's
/// min_region_ratio; regions exactly at the ratio survive.
inline BinaryMask remove_small_regions(const BinaryMask& mask, Organ organ, const OrganPostConfig& config) {
    const OrganPost& p = config.at(organ);
    const Labeling lab = connected_components(mask, p.connectivity);
    const double image_area = static_cast<double>(mask.pixel_count());
    std::vector<std::uint8_t> keep(lab.areas.size() + 1, 0);
    for (std::size_t id = 1; id <= lab.areas.size(); ++id) {
        keep[id] = static_cast<double>(lab.areas[id - 1]) / image_area < p.min_region_ratio ? 0 : 1;
    }
    std::vector<std::uint8_t> bits(mask.pixel_count());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = keep[lab.labels[i]];
    return BinaryMask(mask.width(), mask.height(), 1, std::move(bits));
}

inline BinaryMask postprocess(const ProbMap& map, Organ organ, const OrganPostConfig& config) {
    return remove_small_regions(binarize(map, config.at(organ).threshold), organ, config);
}

} // namespace ftu
