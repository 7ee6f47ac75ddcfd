#pragma once

#include <limits>

namespace qctl {

// One row of a convergence history.
struct IterationReport {
    int iteration = 0;
    double terminal = 0.0;  // I
    double total = 0.0;     // J
    double energy = 0.0;    // z(T)
    double max_norm_drift = 0.0;
    double singular_fraction = 0.0;

    // Gradient method: accepted step and line-search trials.
    double step = 0.0;
    int trials = 0;
    double gradient_norm = std::numeric_limits<double>::quiet_NaN();
    double max_abs_k1 = std::numeric_limits<double>::quiet_NaN();

    // Krotov method: damping factor theta that was accepted.
    double damping = 1.0;
    bool damped = false;
};

}  // namespace qctl
