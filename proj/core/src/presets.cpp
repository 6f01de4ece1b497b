#include "ompath/presets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ompath/quadrature.hpp"

namespace ompath {

JumpSpec one_sided_jumps_preset(std::size_t modes, double c, double beta, double alpha) {
    JumpSpec spec;
    spec.modes.resize(modes);
    for (ModeJumps& m : spec.modes) {
        m.kind = JumpKind::one_sided;
        m.plus = {c, beta, alpha};
    }
    spec.tail = TailRule{TailKind::finite_support, 0.5};
    validate_jump_spec(spec);
    return spec;
}

JumpSpec two_sided_jumps_preset(std::size_t modes, double c_plus, double beta_plus,
                                double alpha_plus, double c_minus, double beta_minus,
                                double alpha_minus) {
    JumpSpec spec;
    spec.modes.resize(modes);
    for (ModeJumps& m : spec.modes) {
        m.kind = JumpKind::two_sided;
        m.plus = {c_plus, beta_plus, alpha_plus};
        m.minus = {c_minus, beta_minus, alpha_minus};
    }
    spec.tail = TailRule{TailKind::finite_support, 0.5};
    validate_jump_spec(spec);
    return spec;
}

double cosine_average_weight(std::size_t j, double tol) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j);
    return integrate([w](double y) { return std::cos(w * y); }, 0.0, 1.0, tol).value;
}

NonlocalHeatModel heat_nonlocal_preset(std::size_t modes, ScalarFunction f, double jump_c,
                                       double jump_beta, double jump_alpha, double horizon) {
    if (modes == 0) throw std::invalid_argument("heat preset: at least one mode is required");
    if (!(horizon > 0.0)) throw std::invalid_argument("heat preset: horizon must be positive");

    NonlocalHeatModel preset;
    preset.model.horizon = horizon;
    preset.model.eigenvalues.resize(modes);
    preset.model.diffusion.assign(modes, 1.0);
    preset.weights.resize(modes);
    for (std::size_t j = 1; j <= modes; ++j) {
        const double freq = 2.0 * std::numbers::pi * static_cast<double>(j);
        preset.model.eigenvalues[j - 1] = freq * freq;
        preset.weights[j - 1] = cosine_average_weight(j);
    }
    preset.drift = make_nonlocal_rank_one_drift(preset.weights, std::move(f), 0.5 * horizon);
    preset.jumps = one_sided_jumps_preset(modes, jump_c, jump_beta, jump_alpha);
    return preset;
}

double nonlocal_trace_identity(const NonlocalHeatModel& preset, const DiscretePath& path) {
    return trace_term(path, *preset.drift);
}

ActionBreakdown nonlocal_heat_action(const NonlocalHeatModel& preset, const DiscretePath& path,
                                     double quad_tol) {
    if (path.intervals() % 2 != 0)
        throw std::invalid_argument(
            "heat preset action: the drift window switches at horizon/2, so the grid needs a "
            "node there: intervals must be even");
    const LevyDriftCorrection eta = eta_correction(preset.jumps, quad_tol);
    return evaluate_action(path, preset.model, *preset.drift, eta.eta,
                           ActionForm::completed_square);
}

}  // namespace ompath
