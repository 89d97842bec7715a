#pragma once

#include <limits>

#include "ftu/core/errors.hpp"

namespace ftu::eval {

/// Reduce-on-plateau schedule over a lower-is-better metric.
struct LrPlateauState {
    double current_lr = 0.001;
    double best_metric = std::numeric_limits<double>::infinity();
    int epochs_since_improvement = 0;
    int patience = 3;
    double factor = 0.5;
    double min_delta = 1e-4;
};

/// Improvement (metric < best - min_delta) resets the counter; once the
/// counter exceeds patience the rate is multiplied by factor and the counter
/// restarts.
inline LrPlateauState lr_plateau_step(LrPlateauState s, double metric) {
    if (!(s.current_lr > 0.0) || !(s.factor > 0.0 && s.factor < 1.0)) {
        throw ContractError("lr plateau: invalid state");
    }
    if (metric < s.best_metric - s.min_delta) {
        s.best_metric = metric;
        s.epochs_since_improvement = 0;
    } else {
        ++s.epochs_since_improvement;
    }
    if (s.epochs_since_improvement > s.patience) {
        s.current_lr *= s.factor;
        s.epochs_since_improvement = 0;
    }
    return s;
}

} // namespace ftu::eval
