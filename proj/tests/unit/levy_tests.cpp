#include "ompath/levy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "ompath/errors.hpp"
#include "ompath/rng.hpp"
#include "support/oracles.hpp"

using namespace ompath;

namespace {

JumpSpec one_sided(std::size_t modes, double c = 1.0, double beta = 1.0, double alpha = 0.5) {
    JumpSpec spec;
    spec.modes.resize(modes);
    for (ModeJumps& m : spec.modes) {
        m.kind = JumpKind::one_sided;
        m.plus = {c, beta, alpha};
    }
    return spec;
}

JumpSpec two_sided_symmetric(std::size_t modes) {
    JumpSpec spec = one_sided(modes);
    for (ModeJumps& m : spec.modes) {
        m.kind = JumpKind::two_sided;
        m.minus = m.plus;
    }
    return spec;
}

// int_0^1 z^{-1/2} e^{-z} dz via z = u^2, independently of the library's
// quadrature; equals sqrt(pi) erf(1) in closed form.
double unit_moment_oracle() {
    return oracles::simpson([](double u) { return 2.0 * std::exp(-u * u); }, 0.0, 1.0, 1e-14);
}

}  // namespace

TEST_CASE("small-jump moment matches the closed form") {
    const double oracle = unit_moment_oracle();
    CHECK(std::abs(oracle - std::sqrt(std::numbers::pi) * std::erf(1.0)) <= 1e-12);

    auto report = h4_moment(one_sided(1));
    REQUIRE(report.modes.size() == 1);
    CHECK(report.per_mode_finite);
    CHECK(report.sum_finite);
    CHECK(std::abs(report.modes[0].value - oracle) <= 1e-9);
    CHECK(report.declared_sum == report.modes[0].value);
    CHECK(report.tail_sum == 0.0);
}

TEST_CASE("moment diverges exactly when some alpha reaches 1") {
    auto divergent = h4_moment(one_sided(1, 1.0, 1.0, 1.5));
    CHECK_FALSE(divergent.modes[0].finite);
    CHECK_FALSE(divergent.per_mode_finite);
    CHECK_FALSE(divergent.passed());

    auto critical = h4_moment(one_sided(1, 1.0, 1.0, 1.0));
    CHECK_FALSE(critical.per_mode_finite);

    // mixed spec: the verdict names the offending mode through eta_correction
    JumpSpec mixed = one_sided(2);
    mixed.modes[1].plus.alpha = 1.5;
    CHECK_FALSE(h4_moment(mixed).per_mode_finite);
    try {
        eta_correction(mixed, 1e-10);
        FAIL("expected precondition_error");
    } catch (const precondition_error& e) {
        CHECK(std::string(e.what()).find("mode 2") != std::string::npos);
    }
}

TEST_CASE("one-sided small-jump mean equals the absolute moment") {
    auto spec = one_sided(3, 0.7, 1.3, 0.4);
    auto eta = eta_correction(spec, 1e-10);
    auto moment = h4_moment(spec);
    REQUIRE(eta.eta.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(eta.eta[j] - moment.modes[j].value) <= 1e-12);
        CHECK(eta.error[j] > 0.0);
        CHECK(eta.error[j] <= 1e-10);
    }
}

TEST_CASE("eta is exactly linear in c and cancels under symmetry") {
    auto base = eta_correction(one_sided(1, 1.0, 1.0, 0.5), 1e-10);
    auto doubled = eta_correction(one_sided(1, 2.0, 1.0, 0.5), 1e-10);
    CHECK(doubled.eta[0] == 2.0 * base.eta[0]);

    auto symmetric = eta_correction(two_sided_symmetric(2), 1e-10);
    CHECK(symmetric.eta[0] == 0.0);
    CHECK(symmetric.eta[1] == 0.0);
}

TEST_CASE("square integrability terms and tails") {
    SUBCASE("geometric tail of dyadic intensities sums to exactly one") {
        JumpSpec spec;
        spec.modes.resize(4);
        double c = 0.5;
        for (ModeJumps& m : spec.modes) {
            m.kind = JumpKind::one_sided;
            m.plus = {c, 1.0, 0.5};  // beta = 1 makes the term equal c
            c *= 0.5;
        }
        spec.tail = TailRule{TailKind::geometric, 0.5};
        auto verdict = square_integrability(spec);
        CHECK(verdict.convergent);
        CHECK(verdict.declared_sum == 0.9375);
        CHECK(verdict.tail_sum == 0.0625);
        CHECK(verdict.total() == 1.0);
    }

    SUBCASE("term formula c / beta^(2 - alpha)") {
        JumpSpec spec = one_sided(1, 0.8, 2.0, 0.5);
        spec.tail = TailRule{TailKind::finite_support, 0.5};
        auto verdict = square_integrability(spec);
        CHECK(verdict.convergent);
        CHECK(verdict.declared_sum == doctest::Approx(0.8 / std::pow(2.0, 1.5)).epsilon(1e-14));
        CHECK(verdict.tail_sum == 0.0);
    }

    SUBCASE("constant tail with positive last term diverges") {
        JumpSpec spec = one_sided(2);
        spec.tail = TailRule{TailKind::constant, 0.5};
        CHECK_FALSE(square_integrability(spec).convergent);
    }

    SUBCASE("a declared tail rule is required") {
        CHECK_THROWS_AS(square_integrability(one_sided(1)), std::invalid_argument);
    }
}

TEST_CASE("jump spec validation names the offending mode") {
    JumpSpec bad = one_sided(2);
    bad.modes[1].plus.c = -1.0;
    try {
        validate_jump_spec(bad);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mode 2") != std::string::npos);
    }

    JumpSpec alpha_out = one_sided(1, 1.0, 1.0, 2.0);
    CHECK_THROWS_AS(validate_jump_spec(alpha_out), std::invalid_argument);

    JumpSpec ratio_out = one_sided(1);
    ratio_out.tail = TailRule{TailKind::geometric, 1.0};
    CHECK_THROWS_AS(validate_jump_spec(ratio_out), std::invalid_argument);

    JumpSpec tol_out = one_sided(1);
    tol_out.quad_tol = 0.0;
    CHECK_THROWS_AS(validate_jump_spec(tol_out), std::invalid_argument);
}

TEST_CASE("variation constant") {
    auto spec = one_sided(1);
    const double m = h4_moment(spec).modes[0].value;

    SpectralModel model{{1.0}, {1.0}, 1.0};
    CHECK(std::abs(variation_constant(spec, model) - (1.0 - std::exp(-1.0)) * m) <= 1e-12);

    SUBCASE("monotone in the horizon") {
        SpectralModel longer{{1.0}, {1.0}, 2.0};
        CHECK(variation_constant(spec, longer) > variation_constant(spec, model));
    }
    SUBCASE("monotone in the moment") {
        auto heavier = one_sided(1, 2.0);
        CHECK(variation_constant(heavier, model) > variation_constant(spec, model));
    }
    SUBCASE("malformed inputs") {
        SpectralModel small{{1.0}, {1.0}, 1.0};
        CHECK_THROWS_AS(variation_constant(one_sided(2), small), std::invalid_argument);
        SpectralModel flat{{0.0}, {1.0}, 1.0};
        CHECK_THROWS_AS(variation_constant(spec, flat), std::invalid_argument);
        CHECK_THROWS_AS(variation_constant(one_sided(1, 1.0, 1.0, 1.5), model),
                        precondition_error);
    }
}

TEST_CASE("jump sampler intensities match independent quadrature") {
    const double cutoff = 0.05;
    JumpSampler sampler(one_sided(1), cutoff);

    auto density = [](double z) { return std::pow(z, -1.5) * std::exp(-z); };
    // e^{-45} ~ 3e-20 bounds the dropped tail of every integrand below.
    const double intensity = oracles::simpson(density, cutoff, 45.0, 1e-11);
    const double compensator =
        oracles::simpson([&](double z) { return z * density(z); }, cutoff, 1.0, 1e-12);
    const double mean_rate =
        oracles::simpson([&](double z) { return z * density(z); }, cutoff, 45.0, 1e-12);

    CHECK(std::abs(sampler.intensity(0) - intensity) <= 1e-7 * intensity);
    CHECK(std::abs(sampler.compensator(0) - compensator) <= 1e-9);
    CHECK(std::abs(sampler.mean_jump_rate(0) - mean_rate) <= 1e-9);
    CHECK(sampler.mean_jump_rate(0) > sampler.compensator(0));  // the z >= 1 mass

    SUBCASE("symmetric two-sided rates cancel exactly") {
        JumpSampler sym(two_sided_symmetric(1), cutoff);
        CHECK(sym.compensator(0) == 0.0);
        CHECK(sym.mean_jump_rate(0) == 0.0);
        CHECK(sym.intensity(0) == doctest::Approx(2.0 * sampler.intensity(0)).epsilon(1e-13));
    }
}

TEST_CASE("jump sampling matches its own rates at three sigma") {
    const double cutoff = 0.05;
    const double dt = 0.01;
    const std::size_t steps = 30000;
    JumpSampler sampler(one_sided(1), cutoff);

    auto density = [](double z) { return std::pow(z, -1.5) * std::exp(-z); };
    const double second_moment =
        oracles::simpson([&](double z) { return z * z * density(z); }, cutoff, 45.0, 1e-12);

    auto engine = make_engine(42, 0);
    double total = 0.0;
    std::vector<double> out(1);
    for (std::size_t i = 0; i < steps; ++i) {
        sampler.sample_step(dt, engine, out);
        total += out[0];
    }
    const double horizon = dt * static_cast<double>(steps);
    const double expected = horizon * sampler.mean_jump_rate(0);
    const double sigma = std::sqrt(horizon * second_moment);
    CHECK(std::abs(total - expected) <= 3.0 * sigma);
}

TEST_CASE("jump streams are reproducible and mode-independent") {
    auto spec = one_sided(2);
    auto a = sample_jumps(spec, 5.0, 0.05, 7);
    auto b = sample_jumps(spec, 5.0, 0.05, 7);
    REQUIRE(a.jumps.size() == 2);
    CHECK(a.jumps[0] == b.jumps[0]);
    CHECK(a.jumps[1] == b.jumps[1]);
    CHECK(a.compensator[0] == b.compensator[0]);
    CHECK(a.jumps[0] != a.jumps[1]);  // distinct per-mode streams

    auto c = sample_jumps(spec, 5.0, 0.05, 8);
    CHECK(a.jumps[0] != c.jumps[0]);
}

TEST_CASE("jump sampler rejects malformed inputs") {
    CHECK_THROWS_AS(JumpSampler(one_sided(1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpSampler(one_sided(1), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpSampler(one_sided(1), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(JumpSampler(one_sided(1, 1.0, 1.0, 1.2), 0.05), precondition_error);

    JumpSampler quiet(JumpSpec{{ModeJumps{}}, {}, 1e-10}, 0.05);
    CHECK(quiet.intensity(0) == 0.0);
    std::vector<double> out(1, -1.0);
    auto engine = make_engine(0, 0);
    quiet.sample_step(0.5, engine, out);
    CHECK(out[0] == 0.0);
}
