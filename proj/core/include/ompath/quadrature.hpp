#pragma once

#include <cstddef>
#include <functional>

namespace ompath {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate, <= requested tolerance on success
    std::size_t evaluations = 0;
};

/// Adaptive Gauss-Legendre quadrature of f on [a, b] to absolute tolerance
/// abs_tol. Intervals are bisected until the 15-point estimate of a segment
/// agrees with the sum over its halves; the accumulated disagreement is the
/// (conservative) error estimate. Integrands must be finite on (a, b).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_depth = 48);

}  // namespace ompath
