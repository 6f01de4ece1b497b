#include "ompath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ompath/rng.hpp"

namespace ompath {

std::vector<double> semigroup_factor(const SpectralModel& model, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("semigroup_factor: dt must be positive");
    std::vector<double> out(model.modes());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(-model.eigenvalues[j] * dt);
    return out;
}

ScalarFunction ScalarFunction::make(std::string_view name, double scale) {
    ScalarFunction g;
    g.name = std::string(name);
    g.scale = scale;
    const double a = scale;
    if (name == "zero") {
        g.f = [](double) { return 0.0; };
        g.df = [](double) { return 0.0; };
        g.d2f = [](double) { return 0.0; };
    } else if (name == "const") {
        g.f = [a](double) { return a; };
        g.df = [](double) { return 0.0; };
        g.d2f = [](double) { return 0.0; };
    } else if (name == "linear") {
        g.f = [a](double x) { return a * x; };
        g.df = [a](double) { return a; };
        g.d2f = [](double) { return 0.0; };
    } else if (name == "tanh") {
        g.f = [a](double x) { return a * std::tanh(x); };
        g.df = [a](double x) {
            const double c = std::cosh(x);
            return a / (c * c);
        };
        g.d2f = [a](double x) {
            const double t = std::tanh(x);
            const double c = std::cosh(x);
            return -2.0 * a * t / (c * c);
        };
    } else if (name == "sin") {
        g.f = [a](double x) { return a * std::sin(x); };
        g.df = [a](double x) { return a * std::cos(x); };
        g.d2f = [a](double x) { return -a * std::sin(x); };
    } else if (name == "cubic") {
        g.f = [a](double x) { return a * (x - x * x * x); };
        g.df = [a](double x) { return a * (1.0 - 3.0 * x * x); };
        g.d2f = [a](double x) { return -6.0 * a * x; };
    } else {
        throw std::invalid_argument("ScalarFunction: unknown profile '" + std::string(name) + "'");
    }
    return g;
}

namespace {

void check_x(const Drift& d, std::span<const double> x) {
    if (x.size() != d.dimension())
        throw std::invalid_argument("Drift: state dimension mismatch");
}

class ZeroDrift final : public Drift {
public:
    explicit ZeroDrift(std::size_t modes) : modes_(modes) {}
    std::size_t dimension() const override { return modes_; }
    std::string_view kind() const override { return "zero"; }
    void value(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        std::fill(out.begin(), out.end(), 0.0);
    }
    void jacobian_vec(double, std::span<const double> x, std::span<const double>,
                      std::span<double> out) const override {
        check_x(*this, x);
        std::fill(out.begin(), out.end(), 0.0);
    }
    void jacobian_diag(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        std::fill(out.begin(), out.end(), 0.0);
    }
    void trace_gradient(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    std::size_t modes_;
};

class DiagonalLinearDrift final : public Drift {
public:
    explicit DiagonalLinearDrift(std::vector<double> m) : m_(std::move(m)) {
        if (m_.empty()) throw std::invalid_argument("diagonal-linear drift: empty coefficients");
    }
    std::size_t dimension() const override { return m_.size(); }
    std::string_view kind() const override { return "diagonal-linear"; }
    void value(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < m_.size(); ++j) out[j] = m_[j] * x[j];
    }
    void jacobian_vec(double, std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < m_.size(); ++j) out[j] = m_[j] * v[j];
    }
    void jacobian_diag(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        std::copy(m_.begin(), m_.end(), out.begin());
    }
    void trace_gradient(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    std::vector<double> m_;
};

class ScalarModeDrift final : public Drift {
public:
    ScalarModeDrift(std::size_t modes, ScalarFunction g) : modes_(modes), g_(std::move(g)) {
        if (modes_ == 0) throw std::invalid_argument("scalar drift: modes must be >= 1");
    }
    std::size_t dimension() const override { return modes_; }
    std::string_view kind() const override { return "scalar-nonlinear"; }
    void value(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < modes_; ++j) out[j] = g_.f(x[j]);
    }
    void jacobian_vec(double, std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < modes_; ++j) out[j] = g_.df(x[j]) * v[j];
    }
    void jacobian_diag(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < modes_; ++j) out[j] = g_.df(x[j]);
    }
    void trace_gradient(double, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        for (std::size_t j = 0; j < modes_; ++j) out[j] = g_.d2f(x[j]);
    }

private:
    std::size_t modes_;
    ScalarFunction g_;
};

class NonlocalRankOneDrift final : public Drift {
public:
    NonlocalRankOneDrift(std::vector<double> w, ScalarFunction f, double window_start)
        : w_(std::move(w)), f_(std::move(f)), window_start_(window_start) {
        if (w_.empty()) throw std::invalid_argument("nonlocal drift: empty weights");
    }
    std::size_t dimension() const override { return w_.size(); }
    std::string_view kind() const override { return "nonlocal-rank-one"; }

    void value(double t, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        const double s = f_.f(0.0) + (in_window(t) ? f_.f(functional(x)) : 0.0);
        for (std::size_t j = 0; j < w_.size(); ++j) out[j] = s * w_[j];
    }
    void jacobian_vec(double t, std::span<const double> x, std::span<const double> v,
                      std::span<double> out) const override {
        check_x(*this, x);
        if (!in_window(t)) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        double lv = 0.0;
        for (std::size_t k = 0; k < w_.size(); ++k) lv += w_[k] * v[k];
        const double s = f_.df(functional(x)) * lv;
        for (std::size_t j = 0; j < w_.size(); ++j) out[j] = s * w_[j];
    }
    void jacobian_diag(double t, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        if (!in_window(t)) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double s = f_.df(functional(x));
        for (std::size_t j = 0; j < w_.size(); ++j) out[j] = s * w_[j] * w_[j];
    }
    void trace_gradient(double t, std::span<const double> x, std::span<double> out) const override {
        check_x(*this, x);
        if (!in_window(t)) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        double wsq = 0.0;
        for (double wj : w_) wsq += wj * wj;
        const double s = f_.d2f(functional(x)) * wsq;
        for (std::size_t j = 0; j < w_.size(); ++j) out[j] = s * w_[j];
    }

private:
    bool in_window(double t) const { return t >= window_start_; }
    double functional(std::span<const double> x) const {
        double l = 0.0;
        for (std::size_t k = 0; k < w_.size(); ++k) l += w_[k] * x[k];
        return l;
    }

    std::vector<double> w_;
    ScalarFunction f_;
    double window_start_;
};

}  // namespace

std::shared_ptr<const Drift> make_zero_drift(std::size_t modes) {
    if (modes == 0) throw std::invalid_argument("zero drift: modes must be >= 1");
    return std::make_shared<ZeroDrift>(modes);
}

std::shared_ptr<const Drift> make_diagonal_linear_drift(std::vector<double> coefficients) {
    return std::make_shared<DiagonalLinearDrift>(std::move(coefficients));
}

std::shared_ptr<const Drift> make_scalar_mode_drift(std::size_t modes, ScalarFunction g) {
    return std::make_shared<ScalarModeDrift>(modes, std::move(g));
}

std::shared_ptr<const Drift> make_nonlocal_rank_one_drift(std::vector<double> weights,
                                                          ScalarFunction f, double window_start) {
    return std::make_shared<NonlocalRankOneDrift>(std::move(weights), std::move(f), window_start);
}

bool CheckReport::all_passed() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const CheckEntry& e) { return e.passed; });
}

const CheckEntry* CheckReport::find(std::string_view name) const {
    for (const CheckEntry& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

namespace {

// Deterministic probe points in [-2,2]^M for the boundedness/symmetry proxy
// checks. A fixed seed keeps validation reproducible.
std::vector<std::vector<double>> probe_points(std::size_t modes, std::size_t count) {
    std::mt19937_64 engine = make_engine(0x70726f6265ull, modes);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<double>> pts;
    pts.emplace_back(modes, 0.0);  // center
    while (pts.size() < count) {
        std::vector<double> p(modes);
        for (double& v : p) v = u(engine);
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace

CheckReport validate_model(const SpectralModel& model, const Drift& drift) {
    CheckReport report;
    const std::size_t m = model.modes();

    {
        CheckEntry e{"model.shape", true, 0, ""};
        if (m == 0) {
            e.passed = false;
            e.detail = "at least one mode is required";
        } else if (model.diffusion.size() != m) {
            e.passed = false;
            e.detail = "eigenvalue and diffusion lengths differ";
        } else if (!(model.horizon > 0.0)) {
            e.passed = false;
            e.detail = "horizon must be positive";
        } else if (drift.dimension() != m) {
            e.passed = false;
            e.detail = "drift dimension differs from mode count";
        }
        report.entries.push_back(std::move(e));
    }
    if (!report.entries.front().passed) return report;  // size checks gate the rest

    {
        CheckEntry e{"eigenvalues.positive", true, 0, ""};
        for (std::size_t j = 0; j < m; ++j) {
            if (!(model.eigenvalues[j] > 0.0) || !std::isfinite(model.eigenvalues[j])) {
                e.passed = false;
                e.mode = static_cast<std::ptrdiff_t>(j + 1);
                e.detail = "eigenvalue must be positive";
                break;
            }
        }
        report.entries.push_back(std::move(e));
    }
    {
        CheckEntry e{"eigenvalues.monotone", true, 0, ""};
        for (std::size_t j = 1; j < m; ++j) {
            if (model.eigenvalues[j] < model.eigenvalues[j - 1]) {
                e.passed = false;
                e.mode = static_cast<std::ptrdiff_t>(j + 1);
                e.detail = "eigenvalues must be non-decreasing";
                break;
            }
        }
        report.entries.push_back(std::move(e));
    }
    {
        CheckEntry e{"diffusion.invertible", true, 0, ""};
        for (std::size_t j = 0; j < m; ++j) {
            if (!(model.diffusion[j] > 0.0) || !std::isfinite(model.diffusion[j])) {
                e.passed = false;
                e.mode = static_cast<std::ptrdiff_t>(j + 1);
                e.detail = "diagonal diffusion entry must be positive";
                break;
            }
        }
        report.entries.push_back(std::move(e));
    }

    const auto points = probe_points(m, 16);
    const double t_probe[] = {0.0, 0.25 * model.horizon, 0.75 * model.horizon, model.horizon};

    {
        // Boundedness is checked on a probe box only: a finite sample of
        // [-2,2]^M standing in for "bounded on bounded sets".
        CheckEntry e{"drift.bounded", true, 0, "probe-box proxy on [-2,2]^M"};
        std::vector<double> out(m), unit(m, 0.0);
        for (double t : t_probe) {
            for (const auto& p : points) {
                drift.value(t, p, out);
                for (std::size_t j = 0; j < m && e.passed; ++j) {
                    if (!std::isfinite(out[j]) || std::abs(out[j]) > 1e8) {
                        e.passed = false;
                        e.mode = static_cast<std::ptrdiff_t>(j + 1);
                        e.detail = "drift value non-finite or huge on probe box";
                    }
                }
                drift.jacobian_diag(t, p, out);
                for (std::size_t j = 0; j < m && e.passed; ++j) {
                    if (!std::isfinite(out[j]) || std::abs(out[j]) > 1e8) {
                        e.passed = false;
                        e.mode = static_cast<std::ptrdiff_t>(j + 1);
                        e.detail = "Jacobian diagonal non-finite or huge on probe box";
                    }
                }
                if (!e.passed) break;
            }
            if (!e.passed) break;
        }
        report.entries.push_back(std::move(e));
    }

    {
        CheckEntry e{"drift.symmetric", true, 0, "assembled Jacobian vs transpose, tol 1e-10"};
        std::vector<double> col(m), unit(m, 0.0);
        std::vector<double> jac(m * m);
        const std::size_t n_pts = std::min<std::size_t>(points.size(), 5);
        for (std::size_t pi = 0; pi < n_pts && e.passed; ++pi) {
            const double t = t_probe[pi % 4];
            for (std::size_t k = 0; k < m; ++k) {
                unit[k] = 1.0;
                drift.jacobian_vec(t, points[pi], unit, col);
                unit[k] = 0.0;
                for (std::size_t j = 0; j < m; ++j) jac[j * m + k] = col[j];
            }
            double scale = 1.0;
            for (double v : jac) scale = std::max(scale, std::abs(v));
            for (std::size_t j = 0; j < m && e.passed; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) {
                    if (std::abs(jac[j * m + k] - jac[k * m + j]) > 1e-10 * scale) {
                        e.passed = false;
                        e.mode = static_cast<std::ptrdiff_t>(j + 1);
                        e.detail = "Jacobian asymmetric beyond tolerance";
                        break;
                    }
                }
            }
        }
        report.entries.push_back(std::move(e));
    }

    return report;
}

}  // namespace ompath
