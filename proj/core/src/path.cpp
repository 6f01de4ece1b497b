#include "ompath/path.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ompath {

namespace {

void check_shape(std::size_t intervals, double horizon, std::size_t modes) {
    if (intervals < 2) throw std::invalid_argument("path: at least two intervals are required");
    if (!(horizon > 0.0)) throw std::invalid_argument("path: horizon must be positive");
    if (modes == 0) throw std::invalid_argument("path: at least one mode is required");
}

void check_finite(const std::vector<double>& values) {
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("path: coefficients must be finite");
}

}  // namespace

DiscretePath::DiscretePath(std::size_t intervals, double horizon, std::vector<double> start,
                           std::vector<double> target) {
    check_shape(intervals, horizon, start.size());
    if (start.size() != target.size())
        throw std::invalid_argument("path: start and target dimensions differ");
    check_finite(start);
    check_finite(target);

    intervals_ = intervals;
    modes_ = start.size();
    horizon_ = horizon;
    coefficients_.resize((intervals + 1) * modes_);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(intervals);
        for (std::size_t j = 0; j < modes_; ++j)
            coefficients_[i * modes_ + j] = (1.0 - s) * start[j] + s * target[j];
    }
}

DiscretePath DiscretePath::from_coefficients(std::size_t intervals, double horizon,
                                             std::size_t modes, std::vector<double> rows) {
    check_shape(intervals, horizon, modes);
    if (rows.size() != (intervals + 1) * modes)
        throw std::invalid_argument("path: coefficient count must be (intervals + 1) * modes");
    check_finite(rows);

    DiscretePath p;
    p.intervals_ = intervals;
    p.modes_ = modes;
    p.horizon_ = horizon;
    p.coefficients_ = std::move(rows);
    return p;
}

std::span<const double> DiscretePath::row(std::size_t i) const {
    if (i > intervals_)
        throw std::invalid_argument("path: row index " + std::to_string(i) + " out of range");
    return {coefficients_.data() + i * modes_, modes_};
}

std::span<double> DiscretePath::interior_row(std::size_t i) {
    if (i == 0 || i >= intervals_)
        throw std::invalid_argument("path: row " + std::to_string(i) + " is not interior");
    return {coefficients_.data() + i * modes_, modes_};
}

std::vector<double> DiscretePath::interior() const {
    if (intervals_ < 2) return {};
    return {coefficients_.begin() + static_cast<std::ptrdiff_t>(modes_),
            coefficients_.end() - static_cast<std::ptrdiff_t>(modes_)};
}

void DiscretePath::set_interior(std::span<const double> values) {
    const std::size_t expect = (intervals_ < 2) ? 0 : (intervals_ - 1) * modes_;
    if (values.size() != expect)
        throw std::invalid_argument("path: interior size must be (intervals - 1) * modes");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("path: coefficients must be finite");
    std::copy(values.begin(), values.end(), coefficients_.begin() + static_cast<std::ptrdiff_t>(modes_));
}

std::vector<double> path_derivative(const DiscretePath& path) {
    const std::size_t n = path.intervals();
    const std::size_t m = path.modes();
    const double inv_dt = 1.0 / path.dt();
    const std::vector<double>& c = path.coefficients();
    std::vector<double> d(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            d[i * m + j] = (c[(i + 1) * m + j] - c[i * m + j]) * inv_dt;
    return d;
}

}  // namespace ompath
