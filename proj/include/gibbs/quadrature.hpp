#pragma once

#include <functional>

namespace gibbs {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
    bool converged = false;
};

/// Adaptive Simpson on [a, b]. Stops once the summed error estimate is below
/// max(rel_tol * |value|, abs_tol) or the number of leaf panels hits max_panels.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  double abs_tol = 0.0, int max_panels = 1 << 14);

}  // namespace gibbs
