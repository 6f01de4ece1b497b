#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ompath {

/// Piecewise-linear path on the uniform grid t_i = i * horizon / intervals,
/// stored as (intervals + 1) x modes coefficients, row-major. The first and
/// last rows are the frozen endpoints: no mutating accessor reaches them, so
/// optimizers can only move the interior.
class DiscretePath {
public:
    /// Linear interpolation between start and target.
    DiscretePath(std::size_t intervals, double horizon, std::vector<double> start,
                 std::vector<double> target);

    /// Adopts a full coefficient matrix; the endpoints are its first and last
    /// rows. rows.size() must equal (intervals + 1) * modes and every entry
    /// must be finite.
    static DiscretePath from_coefficients(std::size_t intervals, double horizon,
                                          std::size_t modes, std::vector<double> rows);

    std::size_t intervals() const { return intervals_; }
    std::size_t modes() const { return modes_; }
    double horizon() const { return horizon_; }
    double dt() const { return horizon_ / static_cast<double>(intervals_); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt(); }

    std::span<const double> row(std::size_t i) const;
    std::span<const double> start() const { return row(0); }
    std::span<const double> target() const { return row(intervals_); }

    /// Mutable access to one interior row (throws std::invalid_argument for
    /// the endpoint rows 0 and intervals()).
    std::span<double> interior_row(std::size_t i);

    /// Interior block as a flat (intervals - 1) x modes vector.
    std::vector<double> interior() const;
    void set_interior(std::span<const double> values);

    const std::vector<double>& coefficients() const { return coefficients_; }

private:
    DiscretePath() = default;

    std::size_t intervals_ = 0;
    std::size_t modes_ = 0;
    double horizon_ = 0.0;
    std::vector<double> coefficients_;
};

/// Forward differences d_i = (phi_{i+1} - phi_i) / dt, i = 0..N-1, the path
/// derivative at the cell midpoints. Returned as N x modes, row-major.
std::vector<double> path_derivative(const DiscretePath& path);

}  // namespace ompath
