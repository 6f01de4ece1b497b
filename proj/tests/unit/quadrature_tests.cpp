#include "ompath/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.hpp"

using ompath::integrate;

TEST_CASE("polynomials integrate to closed form") {
    // x^7 over [0,2]: 2^8/8 = 32. A single 15-point panel is already exact.
    auto r = integrate([](double x) { return std::pow(x, 7); }, 0.0, 2.0, 1e-10);
    CHECK(r.value == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(r.error <= 1e-10);
    CHECK(r.evaluations >= 15);
}

TEST_CASE("smooth exponential hits the requested tolerance") {
    auto r = integrate([](double x) { return std::exp(-x); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - (1.0 - std::exp(-1.0))) <= 1e-13);
    CHECK(r.error <= 1e-12);
}

TEST_CASE("oscillatory integrand agrees with the antiderivative") {
    auto r = integrate([](double x) { return std::sin(40.0 * x); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - (1.0 - std::cos(40.0)) / 40.0) <= 1e-11);
}

TEST_CASE("integrable endpoint kink converges") {
    auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(std::abs(r.value - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("matches an independent Simpson oracle") {
    auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
    auto r = integrate(f, -1.0, 2.0, 1e-12);
    const double oracle = oracles::simpson(f, -1.0, 2.0, 1e-13);
    CHECK(std::abs(r.value - oracle) <= 1e-10);
}

TEST_CASE("tighter tolerance costs more evaluations") {
    auto f = [](double x) { return std::sin(25.0 * x) / (1.0 + x * x); };
    auto loose = integrate(f, 0.0, 3.0, 1e-4);
    auto tight = integrate(f, 0.0, 3.0, 1e-12);
    CHECK(tight.evaluations > loose.evaluations);
    CHECK(std::abs(tight.value - loose.value) <= 2e-4);
}

TEST_CASE("degenerate and malformed inputs") {
    auto one = [](double) { return 1.0; };
    auto r = integrate(one, 0.7, 0.7, 1e-10);
    CHECK(r.value == 0.0);
    CHECK(r.error == 0.0);

    CHECK_THROWS_AS(integrate(one, 1.0, 0.0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(integrate(one, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(one, 0.0, 1.0, -1e-3), std::invalid_argument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(integrate(one, nan, 1.0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(integrate([](double) { return std::numeric_limits<double>::infinity(); },
                              0.0, 1.0, 1e-10),
                    std::invalid_argument);
}
