#include "ompath/mc.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

#include "ompath/action.hpp"
#include "ompath/errors.hpp"
#include "ompath/rng.hpp"

namespace ompath {

namespace {

void require_valid(const SpectralModel& model, const Drift& drift, const char* op) {
    const CheckReport report = validate_model(model, drift);
    if (report.all_passed()) return;
    for (const CheckEntry& e : report.entries)
        if (!e.passed)
            throw precondition_error(std::string(op) + ": model validation failed at " + e.name +
                                     (e.detail.empty() ? "" : ": " + e.detail));
}

struct StepTables {
    std::vector<double> decay;     // e^{-lambda dt}
    std::vector<double> noise_sd;  // sqrt(b^2 (1 - e^{-2 lambda dt}) / (2 lambda))
};

StepTables make_step_tables(const SpectralModel& model, double dt) {
    StepTables t;
    const std::size_t m = model.modes();
    t.decay.resize(m);
    t.noise_sd.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = model.eigenvalues[j];
        const double b = model.diffusion[j];
        t.decay[j] = std::exp(-lambda * dt);
        t.noise_sd[j] = b * std::sqrt((1.0 - std::exp(-2.0 * lambda * dt)) / (2.0 * lambda));
    }
    return t;
}

}  // namespace

DiscretePath simulate_mild(const SpectralModel& model, const Drift& drift, const JumpSpec& jumps,
                           std::span<const double> x0, const SimulateOptions& options) {
    if (options.steps < 2) throw std::invalid_argument("simulate: steps must be >= 2");
    if (x0.size() != model.modes())
        throw std::invalid_argument("simulate: initial state dimension and mode count differ");
    if (jumps.size() > model.modes())
        throw std::invalid_argument("simulate: more jump modes than model modes");
    require_valid(model, drift, "simulate");

    const std::size_t n = options.steps;
    const std::size_t m = model.modes();
    const double dt = model.horizon / static_cast<double>(n);
    const StepTables tables = make_step_tables(model, dt);

    std::unique_ptr<JumpSampler> sampler;
    if (options.include_jumps && jumps.any())
        sampler = std::make_unique<JumpSampler>(jumps, options.jump_cutoff, jumps.quad_tol);

    std::mt19937_64 engine = make_engine(options.seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> rows((n + 1) * m);
    std::copy(x0.begin(), x0.end(), rows.begin());
    std::vector<double> x(x0.begin(), x0.end()), f(m), jump(sampler ? sampler->modes() : 0);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        drift.value(t, x, f);
        for (std::size_t j = 0; j < m; ++j)
            x[j] = tables.decay[j] * x[j] + dt * f[j] + tables.noise_sd[j] * normal(engine);
        if (sampler) {
            sampler->sample_step(dt, engine, jump);
            for (std::size_t j = 0; j < jump.size(); ++j)
                x[j] += jump[j] - dt * sampler->compensator(j);
        }
        std::copy(x.begin(), x.end(), rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * m));
    }
    return DiscretePath::from_coefficients(n, model.horizon, m, std::move(rows));
}

namespace {

// Samples are grouped into fixed blocks; block k always runs on the engine
// derived from (seed, k), so the partition of blocks over workers cannot
// change any draw.
constexpr std::size_t kBlockSamples = 8192;

struct TubeCounts {
    std::uint64_t a = 0, b = 0, ref = 0;
};

struct TubeProblem {
    const SpectralModel* model;
    const Drift* drift;
    const JumpSampler* sampler;  // null = no jumps
    std::size_t sim_steps;
    double dt;
    double eps_sq;
    std::size_t num_samples;
    std::uint64_t seed;
    std::vector<double> phi_a;  // (sim_steps + 1) x modes
    std::vector<double> phi_b;
    std::vector<double> x0;
    StepTables tables;
    std::uint8_t* hit_flags = nullptr;  // optional, one per sample
};

TubeCounts run_block(const TubeProblem& p, std::size_t block) {
    const std::size_t m = p.model->modes();
    const std::size_t first = block * kBlockSamples;
    const std::size_t last = std::min(first + kBlockSamples, p.num_samples);

    std::mt19937_64 engine = make_engine(p.seed, block);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> x(m), xref(m), f(m), jump(p.sampler ? p.sampler->modes() : 0);
    TubeCounts counts;

    for (std::size_t s = first; s < last; ++s) {
        std::copy(p.x0.begin(), p.x0.end(), x.begin());
        std::fill(xref.begin(), xref.end(), 0.0);
        double da = 0.0, db = 0.0, dref = 0.0;

        for (std::size_t i = 0; i < p.sim_steps; ++i) {
            const double t = static_cast<double>(i) * p.dt;
            p.drift->value(t, x, f);
            for (std::size_t j = 0; j < m; ++j) {
                const double z = normal(engine);
                x[j] = p.tables.decay[j] * x[j] + p.dt * f[j] + p.tables.noise_sd[j] * z;
                xref[j] = p.tables.decay[j] * xref[j] + p.tables.noise_sd[j] * z;
            }
            if (p.sampler) {
                p.sampler->sample_step(p.dt, engine, jump);
                for (std::size_t j = 0; j < jump.size(); ++j) {
                    const double inc = jump[j] - p.dt * p.sampler->compensator(j);
                    x[j] += inc;
                    xref[j] += inc;
                }
            }
            const double* pa = p.phi_a.data() + (i + 1) * m;
            const double* pb = p.phi_b.data() + (i + 1) * m;
            for (std::size_t j = 0; j < m; ++j) {
                const double ea = x[j] - pa[j];
                const double eb = x[j] - pb[j];
                da += p.dt * ea * ea;
                db += p.dt * eb * eb;
                dref += p.dt * xref[j] * xref[j];
            }
            // All three tubes already missed: the rest of the trajectory
            // cannot change any verdict. Skipping it leaves the block's
            // stream deterministic, it just advances less.
            if (da > p.eps_sq && db > p.eps_sq && dref > p.eps_sq) break;
        }

        const bool ha = da <= p.eps_sq;
        const bool hb = db <= p.eps_sq;
        const bool hr = dref <= p.eps_sq;
        counts.a += ha;
        counts.b += hb;
        counts.ref += hr;
        if (p.hit_flags)
            p.hit_flags[s] = static_cast<std::uint8_t>(ha | (hb << 1) | (hr << 2));
    }
    return counts;
}

std::vector<double> resample_linear(const DiscretePath& path, std::size_t sim_steps) {
    const std::size_t m = path.modes();
    const std::size_t refine = sim_steps / path.intervals();
    std::vector<double> out((sim_steps + 1) * m);
    for (std::size_t i = 0; i <= sim_steps; ++i) {
        const std::size_t cell = std::min(i / refine, path.intervals() - 1);
        const double frac =
            (static_cast<double>(i) - static_cast<double>(cell * refine)) / static_cast<double>(refine);
        const std::span<const double> a = path.row(cell);
        const std::span<const double> b = path.row(cell + 1);
        for (std::size_t j = 0; j < m; ++j) out[i * m + j] = (1.0 - frac) * a[j] + frac * b[j];
    }
    return out;
}

}  // namespace

RatioEstimate tube_ratio(const TubeExperiment& experiment, const SpectralModel& model,
                         const Drift& drift, const JumpSpec& jumps, const DiscretePath& path_a,
                         const DiscretePath& path_b, std::span<const double> eta) {
    if (!(experiment.epsilon > 0.0))
        throw std::invalid_argument("tube ratio: epsilon must be positive");
    if (experiment.num_samples < 1)
        throw std::invalid_argument("tube ratio: at least one sample is required");
    if (path_a.intervals() != path_b.intervals() || path_a.modes() != path_b.modes() ||
        path_a.horizon() != path_b.horizon())
        throw std::invalid_argument("tube ratio: candidate paths must share one grid");
    for (std::size_t j = 0; j < path_a.modes(); ++j)
        if (path_a.start()[j] != path_b.start()[j])
            throw std::invalid_argument("tube ratio: candidate paths must share the start vector");
    if (experiment.sim_steps != 0 && experiment.sim_steps % path_a.intervals() != 0)
        throw std::invalid_argument(
            "tube ratio: sim_steps must be zero or a positive multiple of the path grid");
    if (jumps.size() > model.modes())
        throw std::invalid_argument("tube ratio: more jump modes than model modes");

    // evaluate_action validates the model (precondition) and the dimensions.
    const ActionBreakdown bd_a =
        evaluate_action(path_a, model, drift, eta, ActionForm::completed_square);
    const ActionBreakdown bd_b =
        evaluate_action(path_b, model, drift, eta, ActionForm::completed_square);

    TubeProblem p;
    p.model = &model;
    p.drift = &drift;
    p.sim_steps = experiment.sim_steps == 0 ? path_a.intervals() : experiment.sim_steps;
    p.dt = model.horizon / static_cast<double>(p.sim_steps);
    p.eps_sq = experiment.epsilon * experiment.epsilon;
    p.num_samples = experiment.num_samples;
    p.seed = experiment.seed;
    p.phi_a = resample_linear(path_a, p.sim_steps);
    p.phi_b = resample_linear(path_b, p.sim_steps);
    p.x0.assign(path_a.start().begin(), path_a.start().end());
    p.tables = make_step_tables(model, p.dt);

    std::unique_ptr<JumpSampler> sampler;
    if (experiment.include_jumps && jumps.any()) {
        sampler = std::make_unique<JumpSampler>(jumps, experiment.jump_cutoff, jumps.quad_tol);
        p.sampler = sampler.get();
    } else {
        p.sampler = nullptr;
    }

    RatioEstimate est;
    est.samples = experiment.num_samples;
    est.epsilon = experiment.epsilon;
    est.action_a = bd_a.total;
    est.action_b = bd_b.total;
    est.predicted_ratio = std::exp(bd_b.total - bd_a.total);
    est.include_jumps = p.sampler != nullptr;
    est.jump_cutoff = est.include_jumps ? experiment.jump_cutoff : 0.0;
    if (experiment.record_hits) {
        est.hit_flags.assign(experiment.num_samples, 0);
        p.hit_flags = est.hit_flags.data();
    }

    const std::size_t num_blocks = (p.num_samples + kBlockSamples - 1) / kBlockSamples;
    const unsigned threads = std::max(1u, experiment.threads);
    TubeCounts totals;
    if (threads == 1 || num_blocks <= 1) {
        for (std::size_t k = 0; k < num_blocks; ++k) {
            const TubeCounts c = run_block(p, k);
            totals.a += c.a;
            totals.b += c.b;
            totals.ref += c.ref;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<TubeCounts> partial(threads);
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (;;) {
                    const std::size_t k = next.fetch_add(1);
                    if (k >= num_blocks) return;
                    const TubeCounts c = run_block(p, k);
                    partial[w].a += c.a;
                    partial[w].b += c.b;
                    partial[w].ref += c.ref;
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const TubeCounts& c : partial) {
            totals.a += c.a;
            totals.b += c.b;
            totals.ref += c.ref;
        }
    }

    est.hits_a = totals.a;
    est.hits_b = totals.b;
    est.hits_ref = totals.ref;

    const double n = static_cast<double>(est.samples);
    const auto safe_div = [](double num, double den) {
        if (den > 0.0) return num / den;
        return num > 0.0 ? std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
    };
    est.gamma_a = safe_div(static_cast<double>(est.hits_a), static_cast<double>(est.hits_ref));
    est.gamma_b = safe_div(static_cast<double>(est.hits_b), static_cast<double>(est.hits_ref));
    est.ratio = safe_div(static_cast<double>(est.hits_a), static_cast<double>(est.hits_b));

    est.low_power = est.hits_a < 50 || est.hits_b < 50 || est.hits_ref < 50;
    est.infinite_ci = est.hits_b == 0 || est.hits_ref == 0;

    if (est.hits_a > 0 && est.hits_b > 0) {
        const double pa = static_cast<double>(est.hits_a) / n;
        const double pb = static_cast<double>(est.hits_b) / n;
        est.se_log_ratio = std::sqrt((1.0 - pa) / static_cast<double>(est.hits_a) +
                                     (1.0 - pb) / static_cast<double>(est.hits_b));
        est.se_ratio = est.ratio * est.se_log_ratio;
    } else {
        est.se_log_ratio = std::numeric_limits<double>::infinity();
        est.se_ratio = std::numeric_limits<double>::infinity();
    }
    return est;
}

}  // namespace ompath
