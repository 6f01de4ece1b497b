#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ompath/spectral.hpp"

namespace ompath {

/// One tempered-stable component with density c * e^{-beta z} / z^{1+alpha}
/// on (0, infinity). Requires alpha in (0,2), c > 0, beta > 0.
struct TemperedStableComponent {
    double c = 1.0;
    double beta = 1.0;
    double alpha = 0.5;
};

enum class JumpKind { none, one_sided, two_sided };

/// Jump measure of one mode: none, one-sided (mass on the positive half line),
/// or two-sided (independent positive and reflected negative components).
struct ModeJumps {
    JumpKind kind = JumpKind::none;
    TemperedStableComponent plus;   // one_sided and two_sided
    TemperedStableComponent minus;  // two_sided only

    bool active() const { return kind != JumpKind::none; }
};

enum class TailKind { finite_support, constant, geometric };

/// How per-mode series (small-jump moments, square-integrability terms)
/// continue past the last declared mode. finite_support: they stop. constant:
/// every later mode repeats the last declared term. geometric: later terms
/// decay from the last declared term by `ratio` in (0,1).
struct TailRule {
    TailKind kind = TailKind::finite_support;
    double ratio = 0.5;
};

struct JumpSpec {
    std::vector<ModeJumps> modes;
    std::optional<TailRule> tail;  // required by the series verdicts below
    double quad_tol = 1e-10;

    std::size_t size() const { return modes.size(); }
    bool any() const;
};

/// Parameter-range validation (alpha in (0,2), c > 0, beta > 0 on every active
/// component). Throws std::invalid_argument naming the offending mode.
void validate_jump_spec(const JumpSpec& spec);

struct ModeMoment {
    bool finite = true;
    double value = 0.0;  // meaningful only when finite
    double error = 0.0;  // quadrature error estimate
};

/// Per-mode small-jump absolute moments m_j = int_{|z|<1} |z| nu_j(dz) plus a
/// verdict for the mode sum under the declared tail rule (finite support
/// assumed when none is declared). m_j is finite iff every alpha of mode j
/// is < 1.
struct SmallJumpMomentReport {
    std::vector<ModeMoment> modes;
    bool per_mode_finite = true;
    bool sum_finite = true;
    double declared_sum = 0.0;  // sum over declared modes, when finite
    double tail_sum = 0.0;      // tail-rule extension, when finite

    bool passed() const { return per_mode_finite && sum_finite; }
    double total() const { return declared_sum + tail_sum; }
};

SmallJumpMomentReport h4_moment(const JumpSpec& spec);

/// Verdict on sum_j c_j / beta_j^{2 - alpha_j} (both components for two-sided
/// modes) under the declared tail rule. Requires a declared tail rule.
struct SeriesVerdict {
    bool convergent = true;
    double declared_sum = 0.0;
    double tail_sum = 0.0;

    double total() const { return declared_sum + tail_sum; }
};

SeriesVerdict square_integrability(const JumpSpec& spec);

/// Small-jump mean eta_j = int_{|z|<1} z nu_j(dz) per mode, the constant drift
/// correction the action functional acquires from the jump part. Requires
/// every alpha of every active mode to be < 1 (otherwise the integral
/// diverges); violations raise precondition_error naming the mode.
struct LevyDriftCorrection {
    std::vector<double> eta;
    std::vector<double> error;  // per-mode quadrature error estimates
};

LevyDriftCorrection eta_correction(const JumpSpec& spec, double tol);

/// C = sum_j (1 - e^{-lambda_j T}) / lambda_j * m_j over the declared jump
/// modes: the path-independent constant contributed by small jumps to tube
/// probabilities. Requires m_j finite on every active mode and
/// spec.size() <= model.modes().
double variation_constant(const JumpSpec& spec, const SpectralModel& model);

/// Samples the jump part above a size cutoff. Jumps with |z| >= cutoff are
/// drawn exactly: a Poisson number with the quadrature intensity
/// int_{|z|>=cutoff} nu(dz), each size proposed from the pure-stable tail
/// (inverse CDF) and accepted with probability e^{-beta (z - cutoff)}. Jumps
/// below the cutoff are dropped and only their compensator survives; see
/// mc.hpp for the step convention that consumes it.
class JumpSampler {
public:
    /// cutoff must lie in (0,1); every active mode must have finite small-jump
    /// moments (precondition_error otherwise).
    JumpSampler(const JumpSpec& spec, double cutoff, double quad_tol = 1e-10);

    std::size_t modes() const { return modes_.size(); }
    double cutoff() const { return cutoff_; }

    /// Poisson intensity of retained jumps of mode j.
    double intensity(std::size_t j) const { return modes_[j].intensity_plus + modes_[j].intensity_minus; }
    /// Signed compensator rate int_{cutoff <= |z| < 1} z nu_j(dz).
    double compensator(std::size_t j) const { return modes_[j].compensator; }
    /// Signed mean rate of retained jumps, int_{|z| >= cutoff} z nu_j(dz).
    double mean_jump_rate(std::size_t j) const { return modes_[j].mean_rate; }

    /// Draw the raw jump sums of one step of length dt into out (size modes()).
    /// The compensated increment of mode j is out[j] - dt * compensator(j).
    void sample_step(double dt, std::mt19937_64& engine, std::span<double> out) const;

private:
    struct ModeTables {
        bool active = false;
        double intensity_plus = 0.0, intensity_minus = 0.0;
        double compensator = 0.0;
        double mean_rate = 0.0;
        TemperedStableComponent plus, minus;
    };
    std::vector<ModeTables> modes_;
    double cutoff_ = 0.0;
};

/// One draw of per-mode jump increments over a step of length dt. Mode j uses
/// its own engine derived as derive_seed(seed, j) (rng.hpp), so the modes are
/// independent streams and reproducible individually.
struct JumpIncrements {
    std::vector<double> jumps;        // raw sums of retained jumps
    std::vector<double> compensator;  // rates; compensated increment = jumps[j] - dt*compensator[j]
};

JumpIncrements sample_jumps(const JumpSpec& spec, double dt, double cutoff, std::uint64_t seed);

}  // namespace ompath
