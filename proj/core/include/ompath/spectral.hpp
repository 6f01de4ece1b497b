#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ompath {

/// Spectrally diagonal model on the first M eigenmodes of a negative-type
/// operator A: mode j evolves with rate -eigenvalues[j] and diffusion
/// diffusion[j] (diagonal noise operator; anything non-diagonal is not
/// representable). Construction never validates; validate_model reports
/// hypothesis failures instead of faulting so that bad models can be
/// inspected.
struct SpectralModel {
    std::vector<double> eigenvalues;  // lambda_j, expected positive and non-decreasing
    std::vector<double> diffusion;    // b_j, expected positive
    double horizon = 1.0;             // T

    std::size_t modes() const { return eigenvalues.size(); }
};

/// e^{-lambda_j * dt} per mode. dt must be positive.
std::vector<double> semigroup_factor(const SpectralModel& model, double dt);

/// Scalar profile with analytic first and second derivatives. The catalog
/// names are stable identifiers used by the CLI config and output records.
struct ScalarFunction {
    std::string name = "zero";
    double scale = 1.0;
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;

    double operator()(double x) const { return f(x); }

    /// Catalog: zero, const, linear, tanh, sin, cubic (scale*(x - x^3)).
    /// Throws std::invalid_argument for unknown names.
    static ScalarFunction make(std::string_view name, double scale = 1.0);
};

/// Drift term F(t, x) on mode coefficients. Implementations supply the value,
/// Jacobian-vector products, the Jacobian diagonal, and the gradient of the
/// Jacobian trace; every built-in kind has a symmetric Jacobian by
/// construction, which the action gradient relies on.
class Drift {
public:
    virtual ~Drift() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::string_view kind() const = 0;

    virtual void value(double t, std::span<const double> x, std::span<double> out) const = 0;
    virtual void jacobian_vec(double t, std::span<const double> x, std::span<const double> v,
                              std::span<double> out) const = 0;
    virtual void jacobian_diag(double t, std::span<const double> x, std::span<double> out) const = 0;
    /// Gradient of sum_j dF_j/dx_j with respect to x.
    virtual void trace_gradient(double t, std::span<const double> x, std::span<double> out) const = 0;
};

/// F = 0.
std::shared_ptr<const Drift> make_zero_drift(std::size_t modes);

/// F_j(x) = coefficients[j] * x_j.
std::shared_ptr<const Drift> make_diagonal_linear_drift(std::vector<double> coefficients);

/// F_j(x) = g(x_j) with one scalar profile applied to every mode.
std::shared_ptr<const Drift> make_scalar_mode_drift(std::size_t modes, ScalarFunction g);

/// Rank-one nonlocal drift
///   F_j(t, x) = [ f(0) + f(l(x)) * ind{t >= window_start} ] * weights[j],
///   l(x) = sum_k weights[k] * x_k,
/// i.e. the state enters only through the linear functional l, and the output
/// is injected back along the same weight vector, so the Jacobian
/// f'(l) * w w^T is symmetric rank-one. With weights given by the averages of
/// an orthonormal cosine basis the weights vanish and so does the Jacobian
/// trace; see presets.hpp.
std::shared_ptr<const Drift> make_nonlocal_rank_one_drift(std::vector<double> weights,
                                                          ScalarFunction f,
                                                          double window_start);

struct CheckEntry {
    std::string name;
    bool passed = false;
    std::ptrdiff_t mode = 0;  // 1-based offending mode, 0 when not mode-specific
    std::string detail;
};

struct CheckReport {
    std::vector<CheckEntry> entries;

    bool all_passed() const;
    const CheckEntry* find(std::string_view name) const;
};

/// Hypothesis checks for a model/drift pair. Failures are report entries,
/// never exceptions:
///  - model.shape: sizes consistent, M >= 1, horizon > 0
///  - eigenvalues.positive / eigenvalues.monotone
///  - diffusion.invertible: b_j > 0
///  - drift.bounded: values and Jacobian products finite on a probe box
///    (proxy check on [-2,2]^M, labeled as such in the entry detail)
///  - drift.symmetric: assembled Jacobian symmetric at probe points (1e-10)
CheckReport validate_model(const SpectralModel& model, const Drift& drift);

}  // namespace ompath
