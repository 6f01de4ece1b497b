#include "ompath/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ompath/errors.hpp"
#include "ompath/quadrature.hpp"
#include "ompath/rng.hpp"

namespace ompath {

bool JumpSpec::any() const {
    return std::any_of(modes.begin(), modes.end(),
                       [](const ModeJumps& m) { return m.active(); });
}

namespace {

void check_component(const TemperedStableComponent& comp, std::size_t mode,
                     const char* which) {
    const auto fail = [&](const char* what) {
        throw std::invalid_argument("jump spec: mode " + std::to_string(mode + 1) + " " + which +
                                    " component: " + what);
    };
    if (!(comp.c > 0.0) || !std::isfinite(comp.c)) fail("c must be positive");
    if (!(comp.beta > 0.0) || !std::isfinite(comp.beta)) fail("beta must be positive");
    if (!(comp.alpha > 0.0) || !(comp.alpha < 2.0)) fail("alpha must lie in (0,2)");
}

// int_0^1 z^{-alpha} e^{-beta z} dz for alpha in (0,1), with the endpoint
// singularity removed by z = u^p, p = 1/(1-alpha):
//   = p * int_0^1 exp(-beta u^p) du.
// The result is independent of c by construction, so callers that multiply by
// c scale exactly.
QuadratureResult unit_interval_moment(double alpha, double beta, double abs_tol) {
    const double p = 1.0 / (1.0 - alpha);
    QuadratureResult r = integrate(
        [beta, p](double u) { return std::exp(-beta * std::pow(u, p)); }, 0.0, 1.0, abs_tol);
    r.value *= p;
    r.error *= p;
    return r;
}

ModeMoment component_moment(const TemperedStableComponent& comp, double tol) {
    ModeMoment m;
    if (comp.alpha >= 1.0) {
        m.finite = false;
        return m;
    }
    const QuadratureResult q = unit_interval_moment(comp.alpha, comp.beta, tol);
    m.value = comp.c * q.value;
    m.error = comp.c * q.error;
    return m;
}

ModeMoment mode_moment(const ModeJumps& mode, double tol) {
    switch (mode.kind) {
        case JumpKind::none:
            return {};
        case JumpKind::one_sided:
            return component_moment(mode.plus, tol);
        case JumpKind::two_sided: {
            const ModeMoment a = component_moment(mode.plus, tol);
            const ModeMoment b = component_moment(mode.minus, tol);
            if (!a.finite || !b.finite) return {false, 0.0, 0.0};
            return {true, a.value + b.value, a.error + b.error};
        }
    }
    return {};
}

// Applies the declared tail rule to a series whose last declared term is
// `last`. Returns {finite, tail_sum}.
std::pair<bool, double> tail_extension(const std::optional<TailRule>& tail, double last,
                                       bool have_terms) {
    if (!tail || tail->kind == TailKind::finite_support || !have_terms) return {true, 0.0};
    if (tail->kind == TailKind::constant) {
        if (last > 0.0) return {false, 0.0};
        return {true, 0.0};
    }
    // geometric
    if (!(tail->ratio > 0.0) || !(tail->ratio < 1.0))
        throw std::invalid_argument("jump spec: geometric tail ratio must lie in (0,1)");
    return {true, last * tail->ratio / (1.0 - tail->ratio)};
}

void require_h4(const JumpSpec& spec, const char* op) {
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (!m.active()) continue;
        const bool bad = (m.kind == JumpKind::two_sided)
                             ? (m.plus.alpha >= 1.0 || m.minus.alpha >= 1.0)
                             : (m.plus.alpha >= 1.0);
        if (bad)
            throw precondition_error(std::string(op) + ": small-jump moment diverges on mode " +
                                     std::to_string(j + 1) + " (alpha >= 1)");
    }
}

}  // namespace

void validate_jump_spec(const JumpSpec& spec) {
    if (!(spec.quad_tol > 0.0))
        throw std::invalid_argument("jump spec: quadrature tolerance must be positive");
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (m.kind == JumpKind::one_sided) {
            check_component(m.plus, j, "positive");
        } else if (m.kind == JumpKind::two_sided) {
            check_component(m.plus, j, "positive");
            check_component(m.minus, j, "negative");
        }
    }
    if (spec.tail && spec.tail->kind == TailKind::geometric) {
        if (!(spec.tail->ratio > 0.0) || !(spec.tail->ratio < 1.0))
            throw std::invalid_argument("jump spec: geometric tail ratio must lie in (0,1)");
    }
}

SmallJumpMomentReport h4_moment(const JumpSpec& spec) {
    validate_jump_spec(spec);
    SmallJumpMomentReport report;
    report.modes.reserve(spec.size());
    for (const ModeJumps& m : spec.modes) {
        report.modes.push_back(mode_moment(m, spec.quad_tol));
        const ModeMoment& mm = report.modes.back();
        if (!mm.finite)
            report.per_mode_finite = false;
        else
            report.declared_sum += mm.value;
    }
    report.sum_finite = report.per_mode_finite;
    if (report.sum_finite) {
        const double last = report.modes.empty() ? 0.0 : report.modes.back().value;
        const auto [finite, tail] = tail_extension(spec.tail, last, !report.modes.empty());
        report.sum_finite = finite;
        report.tail_sum = tail;
    }
    return report;
}

SeriesVerdict square_integrability(const JumpSpec& spec) {
    validate_jump_spec(spec);
    if (!spec.tail)
        throw std::invalid_argument(
            "square_integrability: a tail rule (finite_support, constant, or geometric) is "
            "required");
    SeriesVerdict verdict;
    double last = 0.0;
    for (const ModeJumps& m : spec.modes) {
        double term = 0.0;
        if (m.kind == JumpKind::one_sided || m.kind == JumpKind::two_sided)
            term += m.plus.c / std::pow(m.plus.beta, 2.0 - m.plus.alpha);
        if (m.kind == JumpKind::two_sided)
            term += m.minus.c / std::pow(m.minus.beta, 2.0 - m.minus.alpha);
        verdict.declared_sum += term;
        last = term;
    }
    const auto [finite, tail] = tail_extension(spec.tail, last, !spec.modes.empty());
    verdict.convergent = finite;
    verdict.tail_sum = tail;
    return verdict;
}

LevyDriftCorrection eta_correction(const JumpSpec& spec, double tol) {
    validate_jump_spec(spec);
    if (!(tol > 0.0)) throw std::invalid_argument("eta_correction: tolerance must be positive");
    require_h4(spec, "eta_correction");

    // The quadrature runs on the c-independent base integral so that scaling
    // c scales eta exactly; a fixed margin keeps the scaled error estimate
    // within tol for moderate c.
    const double base_tol = tol / 16.0;
    LevyDriftCorrection out;
    out.eta.assign(spec.size(), 0.0);
    out.error.assign(spec.size(), 0.0);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (!m.active()) continue;
        const QuadratureResult plus = unit_interval_moment(m.plus.alpha, m.plus.beta, base_tol);
        double eta = m.plus.c * plus.value;
        double err = m.plus.c * plus.error;
        if (m.kind == JumpKind::two_sided) {
            const QuadratureResult minus =
                unit_interval_moment(m.minus.alpha, m.minus.beta, base_tol);
            eta -= m.minus.c * minus.value;
            err += m.minus.c * minus.error;
        }
        out.eta[j] = eta;
        out.error[j] = err;
    }
    return out;
}

double variation_constant(const JumpSpec& spec, const SpectralModel& model) {
    validate_jump_spec(spec);
    if (spec.size() > model.modes())
        throw std::invalid_argument("variation_constant: more jump modes than model modes");
    if (!(model.horizon > 0.0))
        throw std::invalid_argument("variation_constant: model horizon must be positive");
    require_h4(spec, "variation_constant");

    double c = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (!m.active()) continue;
        const double lambda = model.eigenvalues[j];
        if (!(lambda > 0.0))
            throw std::invalid_argument("variation_constant: eigenvalue of mode " +
                                        std::to_string(j + 1) + " must be positive");
        const ModeMoment mm = mode_moment(m, spec.quad_tol);
        c += (1.0 - std::exp(-lambda * model.horizon)) / lambda * mm.value;
    }
    return c;
}

namespace {

// int_delta^inf z^{-q} e^{-beta z} dz via u = e^{-beta (z - delta)}:
//   = (e^{-beta delta} / beta) int_0^1 (delta - ln(u)/beta)^{-q} du.
// The transformed integrand is bounded on (0,1] and tends to 0 at u=0; the
// Gauss nodes never touch the endpoint.
double exponential_tail_integral(double delta, double q, double beta, double abs_tol) {
    const QuadratureResult r = integrate(
        [delta, q, beta](double u) { return std::pow(delta - std::log(u) / beta, -q); }, 0.0, 1.0,
        abs_tol);
    return std::exp(-beta * delta) / beta * r.value;
}

struct ComponentTables {
    double intensity = 0.0;        // Poisson rate of retained jumps
    double compensator = 0.0;      // int_{delta<=z<1} z nu(dz)
    double moment_above = 0.0;     // int_{z>=delta} z nu(dz)
    TemperedStableComponent comp;  // for size sampling
};

ComponentTables build_component(const TemperedStableComponent& comp, double delta,
                                double quad_tol) {
    ComponentTables t;
    t.comp = comp;
    t.intensity = comp.c * exponential_tail_integral(delta, 1.0 + comp.alpha, comp.beta, quad_tol);
    t.moment_above = comp.c * exponential_tail_integral(delta, comp.alpha, comp.beta, quad_tol);
    const QuadratureResult between = integrate(
        [&comp](double z) { return std::pow(z, -comp.alpha) * std::exp(-comp.beta * z); }, delta,
        1.0, quad_tol);
    t.compensator = comp.c * between.value;
    return t;
}

// One retained-jump size: propose from the pure-stable tail on [delta, inf)
// by inversion, accept with probability e^{-beta (z - delta)}.
double sample_size(const TemperedStableComponent& comp, double delta, std::mt19937_64& engine) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (;;) {
        const double u = 1.0 - u01(engine);  // in (0,1]
        const double z = delta * std::pow(u, -1.0 / comp.alpha);
        if (u01(engine) <= std::exp(-comp.beta * (z - delta))) return z;
    }
}

double sample_component_sum(const ComponentTables& t, double delta, double dt,
                            std::mt19937_64& engine) {
    if (t.intensity <= 0.0) return 0.0;
    std::poisson_distribution<int> count(dt * t.intensity);
    const int n = count(engine);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_size(t.comp, delta, engine);
    return sum;
}

}  // namespace

JumpSampler::JumpSampler(const JumpSpec& spec, double cutoff, double quad_tol) : cutoff_(cutoff) {
    validate_jump_spec(spec);
    if (!(cutoff > 0.0) || !(cutoff < 1.0))
        throw std::invalid_argument("jump sampler: cutoff must lie in (0,1)");
    if (!(quad_tol > 0.0))
        throw std::invalid_argument("jump sampler: quadrature tolerance must be positive");
    require_h4(spec, "jump sampler");

    modes_.resize(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (!m.active()) continue;
        ModeTables& t = modes_[j];
        t.active = true;
        t.plus = m.plus;
        const ComponentTables plus = build_component(m.plus, cutoff, quad_tol);
        t.intensity_plus = plus.intensity;
        t.compensator = plus.compensator;
        t.mean_rate = plus.moment_above;
        if (m.kind == JumpKind::two_sided) {
            t.minus = m.minus;
            const ComponentTables minus = build_component(m.minus, cutoff, quad_tol);
            t.intensity_minus = minus.intensity;
            t.compensator -= minus.compensator;
            t.mean_rate -= minus.moment_above;
        }
    }
}

void JumpSampler::sample_step(double dt, std::mt19937_64& engine, std::span<double> out) const {
    if (!(dt > 0.0)) throw std::invalid_argument("jump sampler: dt must be positive");
    if (out.size() != modes_.size())
        throw std::invalid_argument("jump sampler: output size mismatch");
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const ModeTables& t = modes_[j];
        if (!t.active) {
            out[j] = 0.0;
            continue;
        }
        double sum = 0.0;
        if (t.intensity_plus > 0.0) {
            std::poisson_distribution<int> count(dt * t.intensity_plus);
            const int n = count(engine);
            for (int i = 0; i < n; ++i) sum += sample_size(t.plus, cutoff_, engine);
        }
        if (t.intensity_minus > 0.0) {
            std::poisson_distribution<int> count(dt * t.intensity_minus);
            const int n = count(engine);
            for (int i = 0; i < n; ++i) sum -= sample_size(t.minus, cutoff_, engine);
        }
        out[j] = sum;
    }
}

JumpIncrements sample_jumps(const JumpSpec& spec, double dt, double cutoff, std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_jumps: dt must be positive");
    const JumpSampler sampler(spec, cutoff, spec.quad_tol);

    JumpIncrements inc;
    inc.jumps.assign(spec.size(), 0.0);
    inc.compensator.assign(spec.size(), 0.0);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const ModeJumps& m = spec.modes[j];
        if (!m.active()) continue;
        std::mt19937_64 engine = make_engine(seed, j);
        const ComponentTables plus = build_component(m.plus, cutoff, spec.quad_tol);
        double sum = sample_component_sum(plus, cutoff, dt, engine);
        if (m.kind == JumpKind::two_sided) {
            const ComponentTables minus = build_component(m.minus, cutoff, spec.quad_tol);
            sum -= sample_component_sum(minus, cutoff, dt, engine);
        }
        inc.jumps[j] = sum;
        inc.compensator[j] = sampler.compensator(j);
    }
    return inc;
}

}  // namespace ompath
