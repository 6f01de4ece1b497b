#include "ompath/action.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ompath/errors.hpp"

namespace ompath {

namespace {

void check_dimensions(const DiscretePath& path, const SpectralModel& model, const Drift& drift,
                      std::span<const double> eta) {
    if (path.modes() != model.modes())
        throw std::invalid_argument("action: path and model mode counts differ");
    if (drift.dimension() != model.modes())
        throw std::invalid_argument("action: drift dimension and model mode count differ");
    if (!eta.empty() && eta.size() != model.modes())
        throw std::invalid_argument("action: eta dimension and model mode count differ");
    if (path.horizon() != model.horizon)
        throw std::invalid_argument("action: path and model horizons differ");
}

void require_valid(const SpectralModel& model, const Drift& drift) {
    const CheckReport report = validate_model(model, drift);
    if (report.all_passed()) return;
    for (const CheckEntry& e : report.entries)
        if (!e.passed)
            throw precondition_error("action: model validation failed at " + e.name +
                                     (e.detail.empty() ? "" : ": " + e.detail));
}

}  // namespace

ActionBreakdown evaluate_action(const DiscretePath& path, const SpectralModel& model,
                                const Drift& drift, std::span<const double> eta,
                                ActionForm form) {
    check_dimensions(path, model, drift, eta);
    require_valid(model, drift);

    const std::size_t n = path.intervals();
    const std::size_t m = path.modes();
    const double dt = path.dt();
    const bool has_eta = !eta.empty();

    std::vector<double> mid(m), f(m), diag(m);
    ActionBreakdown out;
    out.form = form;

    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> a = path.row(i);
        const std::span<const double> b = path.row(i + 1);
        const double t_mid = 0.5 * (path.time(i) + path.time(i + 1));
        for (std::size_t j = 0; j < m; ++j) mid[j] = 0.5 * (a[j] + b[j]);

        drift.value(t_mid, mid, f);
        drift.jacobian_diag(t_mid, mid, diag);

        double cell_residual = 0.0;
        double cell_cross = 0.0;
        double cell_trace = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (b[j] - a[j]) / dt;
            const double g = -model.eigenvalues[j] * mid[j] + f[j] - d;
            const double bj = model.diffusion[j];
            if (form == ActionForm::completed_square) {
                const double r = (g - (has_eta ? eta[j] : 0.0)) / bj;
                cell_residual += r * r;
            } else {
                const double r = g / bj;
                cell_residual += r * r;
                if (has_eta) cell_cross += r * (eta[j] / bj);
            }
            cell_trace += diag[j];
        }
        out.residual_term += 0.5 * cell_residual * dt;
        out.levy_cross_term -= cell_cross * dt;
        out.trace_term += 0.5 * cell_trace * dt;
    }

    out.total = out.residual_term + out.trace_term + out.levy_cross_term;
    return out;
}

double trace_term(const DiscretePath& path, const Drift& drift) {
    if (drift.dimension() != path.modes())
        throw std::invalid_argument("trace_term: drift dimension and path mode count differ");
    const std::size_t n = path.intervals();
    const std::size_t m = path.modes();
    const double dt = path.dt();

    std::vector<double> mid(m), diag(m);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> a = path.row(i);
        const std::span<const double> b = path.row(i + 1);
        const double t_mid = 0.5 * (path.time(i) + path.time(i + 1));
        for (std::size_t j = 0; j < m; ++j) mid[j] = 0.5 * (a[j] + b[j]);
        drift.jacobian_diag(t_mid, mid, diag);
        for (std::size_t j = 0; j < m; ++j) total += diag[j];
    }
    return 0.5 * total * dt;
}

}  // namespace ompath
