#pragma once

#include <span>

#include "ompath/path.hpp"
#include "ompath/spectral.hpp"

namespace ompath {

/// The action S(phi) is the negated Onsager-Machlup rate of a spectrally
/// diagonal SPDE driven by Brownian noise plus small tempered-stable jumps.
/// With G_j(t) = -lambda_j phibar_j + F_j(t, phibar) - dphi_j and eta the
/// small-jump mean,
///
///   completed_square:  S = 1/2 int |(G - eta)/b|^2 dt + 1/2 int tr DF dt
///   cross_term:        S = 1/2 int |G/b|^2 dt + 1/2 int tr DF dt
///                          - int <G/b, eta/b> dt
///
/// The two differ by the path-independent constant
/// 1/2 * T * sum_j (eta_j/b_j)^2, so they rank paths identically; the
/// completed-square form is the canonical one (nonnegative residual term, the
/// one the optimizer minimizes), the cross form isolates the jump coupling
/// for diagnostics.
///
/// Discretization is the staggered midpoint rule: cell i contributes at
/// t_{i+1/2} with phibar = (phi_i + phi_{i+1})/2 and dphi = (phi_{i+1} -
/// phi_i)/dt, then a rectangle weight dt. Second-order accurate for smooth
/// paths.
enum class ActionForm { completed_square, cross_term };

struct ActionBreakdown {
    double residual_term = 0.0;    // 1/2 int |residual|^2, nonnegative
    double trace_term = 0.0;       // 1/2 int tr DF (any sign)
    double levy_cross_term = 0.0;  // cross form only, 0 in completed_square
    double total = 0.0;
    ActionForm form = ActionForm::completed_square;
};

/// Evaluates S(path). eta is the per-mode small-jump mean (empty means zero).
/// Requires validate_model(model, drift) to pass (precondition_error
/// otherwise) and matching dimensions (std::invalid_argument). Any finite
/// path on the grid is admissible.
ActionBreakdown evaluate_action(const DiscretePath& path, const SpectralModel& model,
                                const Drift& drift, std::span<const double> eta = {},
                                ActionForm form = ActionForm::completed_square);

/// The trace term alone: 1/2 times the midpoint-rule quadrature of
/// sum_j dF_j/dx_j along the path.
double trace_term(const DiscretePath& path, const Drift& drift);

}  // namespace ompath
