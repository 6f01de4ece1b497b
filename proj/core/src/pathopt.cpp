#include "ompath/pathopt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace ompath {

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> action_gradient(const DiscretePath& path, const SpectralModel& model,
                                    const Drift& drift, std::span<const double> eta) {
    if (path.modes() != model.modes())
        throw std::invalid_argument("action gradient: path and model mode counts differ");
    if (drift.dimension() != model.modes())
        throw std::invalid_argument("action gradient: drift dimension and mode count differ");
    if (!eta.empty() && eta.size() != model.modes())
        throw std::invalid_argument("action gradient: eta dimension and mode count differ");

    const std::size_t n = path.intervals();
    const std::size_t m = path.modes();
    const double dt = path.dt();
    const bool has_eta = !eta.empty();

    // Cell quantities, with rho the residual scaled by 1/b^2:
    //   rho_i = (G_i - eta) / b^2,   w_i = -lambda rho_i + J(phibar_i) rho_i,
    //   tg_i = gradient of tr DF at the midpoint.
    // Row k of the gradient collects its two adjacent cells:
    //   g_k = dt/2 (w_{k-1} + w_k) + (rho_k - rho_{k-1}) + dt/4 (tg_{k-1} + tg_k).
    std::vector<double> mid(m), f(m), rho(n * m), w(n * m), tg(n * m), jv(m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> a = path.row(i);
        const std::span<const double> b = path.row(i + 1);
        const double t_mid = 0.5 * (path.time(i) + path.time(i + 1));
        for (std::size_t j = 0; j < m; ++j) mid[j] = 0.5 * (a[j] + b[j]);
        drift.value(t_mid, mid, f);
        for (std::size_t j = 0; j < m; ++j) {
            const double d = (b[j] - a[j]) / dt;
            const double g = -model.eigenvalues[j] * mid[j] + f[j] - d;
            const double bj = model.diffusion[j];
            rho[i * m + j] = (g - (has_eta ? eta[j] : 0.0)) / (bj * bj);
        }
        // Drift Jacobians are symmetric here, so J^T rho = J rho.
        drift.jacobian_vec(t_mid, mid, {rho.data() + i * m, m}, jv);
        for (std::size_t j = 0; j < m; ++j)
            w[i * m + j] = -model.eigenvalues[j] * rho[i * m + j] + jv[j];
        drift.trace_gradient(t_mid, mid, {tg.data() + i * m, m});
    }

    std::vector<double> grad((n >= 2 ? (n - 1) * m : 0), 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t prev = (k - 1) * m;
        const std::size_t cur = k * m;
        for (std::size_t j = 0; j < m; ++j) {
            grad[(k - 1) * m + j] = 0.5 * dt * (w[prev + j] + w[cur + j]) +
                                    (rho[cur + j] - rho[prev + j]) +
                                    0.25 * dt * (tg[prev + j] + tg[cur + j]);
        }
    }
    return grad;
}

double el_residual(const DiscretePath& path, const SpectralModel& model, const Drift& drift,
                   std::span<const double> eta) {
    const std::vector<double> g = action_gradient(path, model, drift, eta);
    return sup_norm(g) / path.dt();
}

OptimizationResult minimize_path(const SpectralModel& model, const Drift& drift,
                                 std::span<const double> eta, std::span<const double> start,
                                 std::span<const double> target, const OptimizerConfig& config) {
    if (start.size() != model.modes() || target.size() != model.modes())
        throw std::invalid_argument("minimize: endpoint dimension and mode count differ");
    if (!(config.grad_tol > 0.0))
        throw std::invalid_argument("minimize: grad_tol must be positive");
    if (!(config.shrink > 0.0 && config.shrink < 1.0))
        throw std::invalid_argument("minimize: shrink must lie in (0, 1)");
    if (!(config.sufficient_decrease > 0.0 && config.sufficient_decrease < 0.5))
        throw std::invalid_argument("minimize: sufficient_decrease must lie in (0, 0.5)");
    if (config.method == StepMethod::lbfgs && config.memory == 0)
        throw std::invalid_argument("minimize: lbfgs needs at least one curvature pair");

    DiscretePath path = [&] {
        if (config.init_path) {
            const DiscretePath& p = *config.init_path;
            if (p.modes() != model.modes())
                throw std::invalid_argument("minimize: supplied path has wrong mode count");
            if (p.horizon() != model.horizon)
                throw std::invalid_argument("minimize: supplied path has wrong horizon");
            for (std::size_t j = 0; j < model.modes(); ++j)
                if (p.start()[j] != start[j] || p.target()[j] != target[j])
                    throw std::invalid_argument(
                        "minimize: supplied path endpoints differ from start/target");
            return p;
        }
        return DiscretePath(config.intervals, model.horizon,
                            std::vector<double>(start.begin(), start.end()),
                            std::vector<double>(target.begin(), target.end()));
    }();

    OptimizationResult result{path, {}, 0.0, 0.0, 0, false,
                              config.init_path ? "supplied-path" : "linear-interpolation"};

    const auto value = [&](const DiscretePath& p) {
        return evaluate_action(p, model, drift, eta, ActionForm::completed_square).total;
    };

    double f = value(path);
    std::vector<double> g = action_gradient(path, model, drift, eta);
    double gnorm = sup_norm(g);
    if (config.trace) config.trace(0, f, gnorm);

    if (g.empty() || gnorm <= config.grad_tol) {
        result.path = path;
        result.breakdown = evaluate_action(path, model, drift, eta, ActionForm::completed_square);
        result.gradient_norm = gnorm;
        result.el_residual = gnorm / path.dt();
        result.converged = true;
        return result;
    }

    std::vector<double> x = path.interior();
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    std::vector<double> d(x.size()), x_new(x.size()), alpha_buf;
    double alpha_prev = 1.0;

    // Near machine precision the Armijo bound rounds to f itself, so steps
    // with f_new == f are accepted; such steps still polish the gradient, so a
    // step only counts as stalled when it improves neither the objective nor
    // the best gradient norm seen so far.
    constexpr std::size_t kMaxStalledSteps = 20;
    std::size_t stalled = 0;
    double gnorm_best = gnorm;

    std::size_t iter = 0;
    for (; iter < config.max_iters; ++iter) {
        // Search direction.
        if (config.method == StepMethod::lbfgs && !s_hist.empty()) {
            // Two-loop recursion with H0 = (s.y / y.y) I from the latest pair.
            d.assign(g.begin(), g.end());
            alpha_buf.assign(s_hist.size(), 0.0);
            for (std::size_t i = s_hist.size(); i-- > 0;) {
                alpha_buf[i] = rho_hist[i] * dot(s_hist[i], d);
                for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alpha_buf[i] * y_hist[i][k];
            }
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
            for (std::size_t i = 0; i < s_hist.size(); ++i) {
                const double beta = rho_hist[i] * dot(y_hist[i], d);
                for (std::size_t k = 0; k < d.size(); ++k)
                    d[k] += (alpha_buf[i] - beta) * s_hist[i][k];
            }
            for (double& v : d) v = -v;
        } else {
            d.assign(g.size(), 0.0);
            for (std::size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
        }

        double slope = dot(g, d);
        if (!(slope < 0.0)) {  // not a descent direction: fall back to steepest
            for (std::size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
            slope = dot(g, d);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Backtracking with Armijo sufficient decrease. L-BFGS tries the unit
        // step first; plain descent warms up from the last accepted step.
        double alpha = (config.method == StepMethod::lbfgs && !s_hist.empty())
                           ? 1.0
                           : std::min(1.0, 2.0 * alpha_prev);
        bool accepted = false;
        double f_new = f;
        for (std::size_t bt = 0; bt <= config.max_backtracks; ++bt) {
            for (std::size_t k = 0; k < x.size(); ++k) x_new[k] = x[k] + alpha * d[k];
            path.set_interior(x_new);
            f_new = value(path);
            if (f_new <= f + config.sufficient_decrease * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= config.shrink;
        }
        if (!accepted) {
            path.set_interior(x);  // restore the last accepted iterate
            break;
        }
        alpha_prev = alpha;

        std::vector<double> g_new = action_gradient(path, model, drift, eta);
        if (config.method == StepMethod::lbfgs) {
            std::vector<double> s(x.size()), y(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                s[k] = x_new[k] - x[k];
                y[k] = g_new[k] - g[k];
            }
            const double sy = dot(s, y);
            if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
                s_hist.push_back(std::move(s));
                y_hist.push_back(std::move(y));
                rho_hist.push_back(1.0 / sy);
                if (s_hist.size() > config.memory) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
            }
        }

        const bool decreased = f_new < f;

        x.swap(x_new);
        f = f_new;
        g.swap(g_new);
        gnorm = sup_norm(g);
        stalled = (decreased || gnorm < gnorm_best) ? 0 : stalled + 1;
        gnorm_best = std::min(gnorm_best, gnorm);
        if (config.trace) config.trace(iter + 1, f, gnorm);
        if (gnorm <= config.grad_tol) {
            ++iter;
            result.converged = true;
            break;
        }
        if (stalled >= kMaxStalledSteps) {
            ++iter;
            break;
        }
    }

    result.path = path;
    result.breakdown = evaluate_action(path, model, drift, eta, ActionForm::completed_square);
    result.gradient_norm = gnorm;
    result.el_residual = gnorm / path.dt();
    result.iterations = iter;
    return result;
}

}  // namespace ompath
