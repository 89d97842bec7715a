#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"

namespace ftu::eval {

// Segmentation losses over flat probability / label arrays. BCE and focal clamp
// probabilities to [eps, 1 - eps] before taking logs, and their gradients
// vanish where the clamp is active. Dice and Jaccard use p as given.

inline constexpr double kLossEps = 1e-7;

enum class LossKind { bce, soft_dice, focal, jaccard };

struct LossParams {
    double smooth = 1.0;  // soft Dice / Jaccard
    double gamma = 2.0;   // focal
};

struct LossWeights {
    double bce = 1.0;
    double dice = 1.0;
    double focal = 1.0;
    double jaccard = 1.0;
};

namespace detail {

inline void check_inputs(std::span<const double> p, std::span<const double> y) {
    if (p.size() != y.size()) throw ContractError("loss: prediction/label length mismatch");
    if (p.empty()) throw ContractError("loss: empty input");
}

inline double clamp_p(double p) { return std::clamp(p, kLossEps, 1.0 - kLossEps); }
inline bool clamped(double p) { return p < kLossEps || p > 1.0 - kLossEps; }

struct Overlap {
    double inter = 0.0, sum_p = 0.0, sum_y = 0.0;
};

inline Overlap overlap(std::span<const double> p, std::span<const double> y) {
    Overlap o;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = p[i];
        o.inter += q * y[i];
        o.sum_p += q;
        o.sum_y += y[i];
    }
    return o;
}

} // namespace detail

/// -mean(y ln p + (1 - y) ln(1 - p))
inline double bce(std::span<const double> p, std::span<const double> y) {
    detail::check_inputs(p, y);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = detail::clamp_p(p[i]);
        s += y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
    }
    return -s / static_cast<double>(p.size());
}

/// 1 - (2 Σpy + s) / (Σp + Σy + s)
inline double soft_dice_loss(std::span<const double> p, std::span<const double> y, double smooth = 1.0) {
    detail::check_inputs(p, y);
    const auto o = detail::overlap(p, y);
    return 1.0 - (2.0 * o.inter + smooth) / (o.sum_p + o.sum_y + smooth);
}

/// -mean(y (1 - p)^γ ln p + (1 - y) p^γ ln(1 - p))
inline double focal_loss(std::span<const double> p, std::span<const double> y, double gamma = 2.0) {
    detail::check_inputs(p, y);
    if (gamma < 0.0) throw ContractError("focal loss gamma must be >= 0");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = detail::clamp_p(p[i]);
        s += y[i] * std::pow(1.0 - q, gamma) * std::log(q) + (1.0 - y[i]) * std::pow(q, gamma) * std::log(1.0 - q);
    }
    return -s / static_cast<double>(p.size());
}

/// 1 - (Σpy + s) / (Σp + Σy - Σpy + s)
inline double jaccard_loss(std::span<const double> p, std::span<const double> y, double smooth = 1.0) {
    detail::check_inputs(p, y);
    const auto o = detail::overlap(p, y);
    return 1.0 - (o.inter + smooth) / (o.sum_p + o.sum_y - o.inter + smooth);
}

inline double loss(LossKind kind, std::span<const double> p, std::span<const double> y, const LossParams& lp = {}) {
    switch (kind) {
        case LossKind::bce: return bce(p, y);
        case LossKind::soft_dice: return soft_dice_loss(p, y, lp.smooth);
        case LossKind::focal: return focal_loss(p, y, lp.gamma);
        case LossKind::jaccard: return jaccard_loss(p, y, lp.smooth);
    }
    return 0.0;
}

/// Weighted mean of the four losses (equal weights by default).
inline double combined_loss(std::span<const double> p, std::span<const double> y, const LossParams& lp = {},
                            const LossWeights& w = {}) {
    const double total = w.bce + w.dice + w.focal + w.jaccard;
    if (!(total > 0.0)) throw ContractError("loss weights sum to zero");
    return (w.bce * bce(p, y) + w.dice * soft_dice_loss(p, y, lp.smooth) + w.focal * focal_loss(p, y, lp.gamma) +
            w.jaccard * jaccard_loss(p, y, lp.smooth)) /
           total;
}

/// Analytic ∂loss/∂p_i.
inline std::vector<double> loss_gradient(std::span<const double> p, std::span<const double> y, LossKind kind,
                                         const LossParams& lp = {}) {
    detail::check_inputs(p, y);
    const std::size_t n = p.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> g(n, 0.0);
    switch (kind) {
        case LossKind::bce:
            for (std::size_t i = 0; i < n; ++i) {
                if (detail::clamped(p[i])) continue;
                g[i] = -inv_n * (y[i] / p[i] - (1.0 - y[i]) / (1.0 - p[i]));
            }
            break;
        case LossKind::focal: {
            const double gm = lp.gamma;
            if (gm < 0.0) throw ContractError("focal loss gamma must be >= 0");
            for (std::size_t i = 0; i < n; ++i) {
                if (detail::clamped(p[i])) continue;
                const double q = p[i];
                const double pos_pow = std::pow(1.0 - q, gm);
                const double neg_pow = std::pow(q, gm);
                const double pos_dpow = gm == 0.0 ? 0.0 : -gm * std::pow(1.0 - q, gm - 1.0);
                const double neg_dpow = gm == 0.0 ? 0.0 : gm * std::pow(q, gm - 1.0);
                const double d_pos = pos_dpow * std::log(q) + pos_pow / q;
                const double d_neg = neg_dpow * std::log(1.0 - q) - neg_pow / (1.0 - q);
                g[i] = -inv_n * (y[i] * d_pos + (1.0 - y[i]) * d_neg);
            }
            break;
        }
        case LossKind::soft_dice: {
            const auto o = detail::overlap(p, y);
            const double num = 2.0 * o.inter + lp.smooth;
            const double den = o.sum_p + o.sum_y + lp.smooth;
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = -(2.0 * y[i] * den - num) / (den * den);
            }
            break;
        }
        case LossKind::jaccard: {
            const auto o = detail::overlap(p, y);
            const double num = o.inter + lp.smooth;
            const double den = o.sum_p + o.sum_y - o.inter + lp.smooth;
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = -(y[i] * den - num * (1.0 - y[i])) / (den * den);
            }
            break;
        }
    }
    return g;
}

} // namespace ftu::eval
