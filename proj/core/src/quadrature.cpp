#include "ompath/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ompath {
namespace {

constexpr int kNodes = 15;

struct GaussRule {
    std::array<double, kNodes> x{};  // nodes on [-1, 1]
    std::array<double, kNodes> w{};
};

// Nodes are the roots of the Legendre polynomial P_15, found by Newton from
// the Chebyshev initial guess; weights w = 2 / ((1 - x^2) P'_15(x)^2).
GaussRule build_rule() {
    GaussRule rule;
    const int n = kNodes;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

const GaussRule& rule() {
    static const GaussRule r = build_rule();
    return r;
}

double gauss15(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
    const GaussRule& r = rule();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < kNodes; ++i) sum += r.w[i] * f(mid + half * r.x[i]);
    evals += kNodes;
    return half * sum;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
    if (!(b > a)) {
        if (a == b) return {0.0, 0.0, 0};
        throw std::invalid_argument("integrate: interval must satisfy a <= b");
    }

    struct Segment {
        double a, b, estimate, tol;
        int depth;
    };

    QuadratureResult result;
    std::vector<Segment> stack;
    stack.push_back({a, b, gauss15(f, a, b, result.evaluations), abs_tol, 0});

    while (!stack.empty()) {
        Segment s = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (s.a + s.b);
        const double left = gauss15(f, s.a, mid, result.evaluations);
        const double right = gauss15(f, mid, s.b, result.evaluations);
        const double refined = left + right;
        if (!std::isfinite(refined))
            throw std::invalid_argument("integrate: integrand produced a non-finite value");
        const double disagreement = std::abs(refined - s.estimate);
        if (disagreement <= s.tol || s.depth >= max_depth) {
            result.value += refined;
            result.error += disagreement;
        } else {
            stack.push_back({s.a, mid, left, 0.5 * s.tol, s.depth + 1});
            stack.push_back({mid, s.b, right, 0.5 * s.tol, s.depth + 1});
        }
    }
    if (!std::isfinite(result.value))
        throw std::invalid_argument("integrate: integrand produced a non-finite value");
    return result;
}

}  // namespace ompath
