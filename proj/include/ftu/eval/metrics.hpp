#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/raster.hpp"

namespace ftu::eval {

/// 2|P ∩ T| / (|P| + |T|); two empty masks score 1.
inline double dice(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_shape(truth)) {
        throw ContractError("dice: " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                            " vs " + std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
    }
    std::size_t p = 0, t = 0, both = 0;
    const auto a = pred.data();
    const auto b = truth.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        p += a[i];
        t += b[i];
        both += a[i] & b[i];
    }
    if (p + t == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(p + t);
}

struct MaskPair {
    const BinaryMask* pred;
    const BinaryMask* truth;
};

/// Unweighted mean of per-mask Dice.
inline double mean_dice(std::span<const MaskPair> pairs) {
    if (pairs.empty()) throw ContractError("mean_dice of an empty list");
    double sum = 0.0;
    for (const MaskPair& p : pairs) sum += dice(*p.pred, *p.truth);
    return sum / static_cast<double>(pairs.size());
}

inline double mean_of(std::span<const double> scores) {
    if (scores.empty()) throw ContractError("mean of an empty list");
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

struct ReportRow {
    std::string group;  // organ name or "overall"
    std::size_t n_samples = 0;
    double mean_dice = 0.0;
};

/// Per-organ rows (in organ order, only organs that occur) plus an "overall"
/// row. `scores[i]` belongs to `organs[i]`.
inline std::vector<ReportRow> organ_report(std::span<const Organ> organs, std::span<const double> scores) {
    if (organs.size() != scores.size()) throw ContractError("organ_report: length mismatch");
    std::vector<ReportRow> rows;
    for (Organ o : kAllOrgans) {
        std::vector<double> s;
        for (std::size_t i = 0; i < organs.size(); ++i)
            if (organs[i] == o) s.push_back(scores[i]);
        if (!s.empty()) rows.push_back({std::string(to_string(o)), s.size(), mean_of(s)});
    }
    if (!scores.empty()) rows.push_back({"overall", scores.size(), mean_of(scores)});
    return rows;
}

/// Public-board score restricted to the HuBMAP share: raw / proportion, capped at 1.
inline double adjust_public_score(double raw, double hubmap_proportion) {
    if (!(hubmap_proportion > 0.0 && hubmap_proportion <= 1.0)) {
        throw ContractError("hubmap proportion must lie in (0, 1]");
    }
    return std::min(1.0, raw / hubmap_proportion);
}

} // namespace ftu::eval
