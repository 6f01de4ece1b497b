#pragma once

#include <cstddef>
#include <memory>

#include "ompath/action.hpp"
#include "ompath/levy.hpp"
#include "ompath/spectral.hpp"

namespace ompath {

/// Ready-made model instances.

/// One-sided tempered-stable jumps with identical parameters on `modes`
/// modes, finite-support tail rule.
JumpSpec one_sided_jumps_preset(std::size_t modes, double c = 1.0, double beta = 1.0,
                                double alpha = 0.5);

/// Two-sided variant; defaults are symmetric, for which the small-jump mean
/// cancels exactly.
JumpSpec two_sided_jumps_preset(std::size_t modes, double c_plus = 1.0, double beta_plus = 1.0,
                                double alpha_plus = 0.5, double c_minus = 1.0,
                                double beta_minus = 1.0, double alpha_minus = 0.5);

/// Heat equation on [0,1] with Neumann boundary, truncated to the cosine
/// modes e_j(y) = cos(2 pi j y), j = 1..M (the constant mode is excluded):
/// eigenvalues (2 pi j)^2, identity diffusion, one-sided tempered-stable
/// jumps, and the rank-one nonlocal drift whose weight vector holds the
/// basis averages integral_0^1 cos(2 pi j y) dy. Those averages vanish, which
/// kills the Jacobian trace structurally: the trace term of any path is zero
/// regardless of f. Perturbing the weights (see tests) breaks it, so the
/// identity is a property of the basis pairing, not of the drift profile.
struct NonlocalHeatModel {
    SpectralModel model;
    std::shared_ptr<const Drift> drift;
    JumpSpec jumps;
    std::vector<double> weights;  // the precomputed basis averages
};

NonlocalHeatModel heat_nonlocal_preset(std::size_t modes, ScalarFunction f, double jump_c = 1.0,
                                       double jump_beta = 1.0, double jump_alpha = 0.5,
                                       double horizon = 1.0);

/// integral_0^1 cos(2 pi j y) dy by adaptive quadrature (zero up to quadrature
/// noise for j >= 1). Exposed so tests can rebuild the weight vector
/// independently.
double cosine_average_weight(std::size_t j, double tol = 1e-14);

/// Trace term of the preset drift along a path. No assertion is made here;
/// callers check it against the structural-zero expectation.
double nonlocal_trace_identity(const NonlocalHeatModel& preset, const DiscretePath& path);

/// Action of a path under the preset: the small-jump mean is computed from
/// the preset's jump spec at tolerance quad_tol and the completed-square form
/// is delegated to evaluate_action verbatim. The drift's time window switches
/// at horizon/2, so the grid must place a node there: intervals must be even
/// (std::invalid_argument otherwise).
ActionBreakdown nonlocal_heat_action(const NonlocalHeatModel& preset, const DiscretePath& path,
                                     double quad_tol = 1e-10);

}  // namespace ompath
