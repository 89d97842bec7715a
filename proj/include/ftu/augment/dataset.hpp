#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/rng.hpp"

namespace ftu::augment {

struct SampleEntry {
    SampleMeta meta;
    std::string image_path;
    std::string mask;  // path or inline RLE
};

struct PseudoPool {
    std::string name;  // e.g. "HPA-extra", "GTEX"
    std::vector<SampleEntry> samples;
};

struct DatasetSpec {
    std::vector<SampleEntry> labeled;
    std::vector<PseudoPool> pseudo_pools;
    std::vector<std::string> exclusions;
    double pseudo_fraction = 0.3;
};

struct SampleRef {
    std::string id;
    std::string pool;  // "labeled" or the pseudo pool name
    friend bool operator==(const SampleRef&, const SampleRef&) = default;
};

struct FilterResult {
    DatasetSpec spec;
    std::size_t removed = 0;
    std::vector<std::string> unknown_ids;  // exclusions that matched nothing
};

/// Drops excluded ids from the labeled list. Unknown ids are reported, not fatal.
inline FilterResult filter_samples(const DatasetSpec& spec) {
    FilterResult r;
    r.spec = spec;
    const std::unordered_set<std::string> excluded(spec.exclusions.begin(), spec.exclusions.end());
    std::unordered_set<std::string> known;
    for (const auto& s : spec.labeled) known.insert(s.meta.id);
    for (const auto& id : spec.exclusions)
        if (!known.contains(id)) r.unknown_ids.push_back(id);
    std::erase_if(r.spec.labeled, [&](const SampleEntry& s) { return excluded.contains(s.meta.id); });
    r.removed = spec.labeled.size() - r.spec.labeled.size();
    return r;
}

/// Draws an epoch: each slot is a pseudo-labeled sample (uniform over the
/// union of pools) with probability pseudo_fraction, otherwise a uniform
/// non-excluded labeled sample.
inline std::vector<SampleRef> compose_epoch(const DatasetSpec& spec, std::size_t epoch_len, SeededRng& rng) {
    if (!(spec.pseudo_fraction >= 0.0 && spec.pseudo_fraction <= 1.0)) {
        throw ConfigError("pseudo_fraction outside [0,1]");
    }
    std::vector<SampleRef> pseudo;
    for (const auto& pool : spec.pseudo_pools)
        for (const auto& s : pool.samples) pseudo.push_back({s.meta.id, pool.name});
    const std::unordered_set<std::string> excluded(spec.exclusions.begin(), spec.exclusions.end());
    std::vector<SampleRef> labeled;
    for (const auto& s : spec.labeled)
        if (!excluded.contains(s.meta.id)) labeled.push_back({s.meta.id, "labeled"});

    if (spec.pseudo_fraction > 0.0 && pseudo.empty()) {
        throw ConfigError("pseudo_fraction > 0 but every pseudo-label pool is empty");
    }
    if (spec.pseudo_fraction < 1.0 && labeled.empty()) {
        throw ConfigError("no labeled samples left after exclusions");
    }
    std::vector<SampleRef> out;
    out.reserve(epoch_len);
    for (std::size_t i = 0; i < epoch_len; ++i) {
        const bool from_pseudo = rng.bernoulli(spec.pseudo_fraction);
        const auto& src = from_pseudo ? pseudo : labeled;
        out.push_back(src[rng.uniform_index(src.size())]);
    }
    return out;
}

} // namespace ftu::augment
