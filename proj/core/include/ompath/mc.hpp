#pragma once

#include <cstdint>
#include <vector>

#include "ompath/levy.hpp"
#include "ompath/path.hpp"
#include "ompath/spectral.hpp"

namespace ompath {

/// Exponential-Euler step of the mild solution on [0, model.horizon]:
///   X_{i+1,j} = e^{-lambda_j dt} X_{i,j} + dt * F_j(t_i, X_i)
///               + Normal(0, b_j^2 (1 - e^{-2 lambda_j dt}) / (2 lambda_j))
///               + [jump sums - dt * compensator]   (when jumps are enabled)
/// The Gaussian increment carries the exact one-step conditional variance, so
/// with F = 0 and no jumps the per-mode marginals are exact in law at every
/// grid node, for any step count. Jump convention: retained jumps
/// (|z| >= cutoff) and their compensator are applied at the end of the step
/// without intra-step semigroup decay, and sub-cutoff jumps are dropped
/// entirely (their compensated integral has zero mean); both approximations
/// are first order in dt.
struct SimulateOptions {
    std::size_t steps = 64;
    std::uint64_t seed = 0;
    bool include_jumps = false;
    double jump_cutoff = 0.05;
};

DiscretePath simulate_mild(const SpectralModel& model, const Drift& drift, const JumpSpec& jumps,
                           std::span<const double> x0, const SimulateOptions& options);

/// Tube-probability ratio experiment. Both candidate paths must share one
/// grid and one starting vector x; the reference process starts at 0 with
/// F = 0. Distances use the discrete L^2([0,T];H) norm
/// dt * sum_{i>=1} |X(t_i) - phi(t_i)|^2. One noise realization per sample
/// drives the comparison process and the reference process (common random
/// numbers), and the same sample set serves every tube.
struct TubeExperiment {
    double epsilon = 0.1;
    std::size_t num_samples = 100000;
    std::uint64_t seed = 0;
    /// Simulation steps; 0 means the paths' own grid, otherwise a positive
    /// multiple of it (candidate paths are piecewise linear, so they evaluate
    /// exactly on refined grids).
    std::size_t sim_steps = 0;
    bool include_jumps = false;
    double jump_cutoff = 0.05;
    unsigned threads = 1;
    bool record_hits = false;
};

/// Sampling is split into fixed blocks of samples; block k uses the engine
/// derive_seed(seed, k) regardless of which worker runs it, and per-tube hit
/// counts are integers, so results are bit-identical for every thread count.
struct RatioEstimate {
    std::size_t samples = 0;
    double epsilon = 0.0;

    std::uint64_t hits_a = 0, hits_b = 0, hits_ref = 0;
    double gamma_a = 0.0, gamma_b = 0.0;  // tube probabilities relative to the reference tube
    double ratio = 0.0;                   // gamma_a / gamma_b == hits_a / hits_b
    double se_log_ratio = 0.0;            // delta-method SE of log(ratio), independent binomials
    double se_ratio = 0.0;                // ratio * se_log_ratio

    double action_a = 0.0, action_b = 0.0;  // completed-square totals on the paths' grid
    double predicted_ratio = 0.0;           // exp(action_b - action_a)

    bool low_power = false;    // some tube collected fewer than 50 hits
    bool infinite_ci = false;  // a denominator tube collected zero hits

    bool include_jumps = false;
    double jump_cutoff = 0.0;

    /// record_hits only: per sample, bit 0 = tube a, bit 1 = tube b,
    /// bit 2 = reference tube.
    std::vector<std::uint8_t> hit_flags;
};

RatioEstimate tube_ratio(const TubeExperiment& experiment, const SpectralModel& model,
                         const Drift& drift, const JumpSpec& jumps, const DiscretePath& path_a,
                         const DiscretePath& path_b, std::span<const double> eta = {});

}  // namespace ompath
