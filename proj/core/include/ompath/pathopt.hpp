#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "ompath/action.hpp"

namespace ompath {

enum class StepMethod { gradient_descent, lbfgs };

struct OptimizerConfig {
    std::size_t max_iters = 5000;
    /// Convergence threshold on the sup-norm of the interior gradient.
    double grad_tol = 1e-8;
    /// Backtracking line search: step *= shrink until the sufficient-decrease
    /// test f(x + a d) <= f(x) + sufficient_decrease * a * <g, d> holds.
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    std::size_t max_backtracks = 60;
    /// gradient_descent is the plain baseline; lbfgs (the default) keeps
    /// `memory` curvature pairs and is what makes stiff quadratic problems
    /// converge within a few hundred iterations instead of tens of thousands.
    StepMethod method = StepMethod::lbfgs;
    std::size_t memory = 10;
    /// Grid used by the linear-interpolation initializer.
    std::size_t intervals = 64;
    /// Supplied-path initializer; endpoints must equal start/target.
    std::optional<DiscretePath> init_path;
    /// Per-accepted-iterate trace: (iteration, action, gradient sup-norm).
    std::function<void(std::size_t, double, double)> trace;
};

struct OptimizationResult {
    DiscretePath path;
    ActionBreakdown breakdown;      // completed-square form at the final path
    double gradient_norm = 0.0;     // sup-norm at exit
    double el_residual = 0.0;       // gradient_norm / dt
    std::size_t iterations = 0;
    bool converged = false;
    std::string initializer;        // "linear-interpolation" or "supplied-path"
};

/// Exact gradient of the discretized completed-square action with respect to
/// the interior coefficients, as a flat (intervals - 1) x modes vector. Uses
/// the symmetry of every drift Jacobian, so J^T v = J v.
std::vector<double> action_gradient(const DiscretePath& path, const SpectralModel& model,
                                    const Drift& drift, std::span<const double> eta = {});

/// Minimizes the completed-square action between frozen endpoints. Descent
/// with backtracking; the accepted action values are strictly non-increasing.
/// A line search that fails max_backtracks times ends the run with
/// converged = false (never a fault). Starting at a stationary point returns
/// after 0 iterations.
OptimizationResult minimize_path(const SpectralModel& model, const Drift& drift,
                                 std::span<const double> eta, std::span<const double> start,
                                 std::span<const double> target,
                                 const OptimizerConfig& config = {});

/// Sup-norm of the interior gradient divided by dt: a discrete
/// Euler-Lagrange residual, O(dt^2) on grids sampling a smooth stationary
/// path.
double el_residual(const DiscretePath& path, const SpectralModel& model, const Drift& drift,
                   std::span<const double> eta = {});

}  // namespace ompath
