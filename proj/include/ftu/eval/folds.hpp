#pragma once

#include <map>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/rng.hpp"

namespace ftu::eval {

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::string> ids;  // input order
    std::vector<std::size_t> folds;

    std::size_t fold_of(const std::string& id) const {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return folds[i];
        throw DataError("no fold assigned to '" + id + "'");
    }
};

/// Organ-stratified k-fold split. Each organ's samples are shuffled with the
/// seed and dealt round-robin; the dealing position carries over from one
/// organ to the next, so both per-organ and total fold sizes differ by <= 1.
inline FoldAssignment stratified_kfold(const std::vector<SampleMeta>& metas, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ContractError("stratified_kfold needs k >= 2");
    FoldAssignment out;
    out.k = k;
    out.folds.assign(metas.size(), 0);
    for (const SampleMeta& m : metas) out.ids.push_back(m.id);

    SeededRng rng(seed);
    std::size_t next = 0;
    for (Organ o : kAllOrgans) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < metas.size(); ++i)
            if (metas[i].organ == o) idx.push_back(i);
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
        }
        for (std::size_t i : idx) {
            out.folds[i] = next;
            next = (next + 1) % k;
        }
    }
    return out;
}

} // namespace ftu::eval
