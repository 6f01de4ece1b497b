#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "config.hpp"
#include "ompath/io.hpp"
#include "ompath/presets.hpp"
#include "ompath/rng.hpp"

namespace ompath::cli {

namespace {

void emit(const RunPlan& plan, const Record& record, const std::string& filename) {
    std::cout << record.str();
    if (plan.write_record) record.save(plan.out_dir / filename);
}

void prepare_out_dir(const RunPlan& plan) {
    if (plan.write_record || plan.write_csv)
        std::filesystem::create_directories(plan.out_dir);
}

std::ofstream open_log(const RunPlan& plan) {
    std::ofstream log;
    if (plan.log_file) {
        log.open(*plan.log_file);
        if (!log)
            throw std::invalid_argument("cannot open log file " + plan.log_file->string());
    }
    return log;
}

void set_check(Record& rec, const CheckEntry& entry) {
    const std::string key = "check." + entry.name;
    rec.set(key, entry.passed ? "pass" : "fail");
    if (!entry.passed) {
        if (entry.mode > 0) rec.set(key + ".mode", static_cast<std::int64_t>(entry.mode));
        if (!entry.detail.empty()) rec.set(key + ".detail", entry.detail);
    }
}

int run_check(const RunPlan& plan) {
    Record rec;
    rec.set("command", "check");
    if (!plan.preset_name.empty()) rec.set("preset", plan.preset_name);
    rec.set("modes", static_cast<std::uint64_t>(plan.model->modes()));

    bool all = true;
    const CheckReport report = validate_model(*plan.model, *plan.drift);
    for (const CheckEntry& e : report.entries) {
        set_check(rec, e);
        all = all && e.passed;
    }

    if (plan.jumps.any()) {
        const SmallJumpMomentReport moments = h4_moment(plan.jumps);
        rec.set("check.jumps.moment", moments.passed() ? "pass" : "fail");
        if (moments.per_mode_finite) {
            rec.set("check.jumps.moment.declared_sum", moments.declared_sum);
            if (moments.sum_finite)
                rec.set("check.jumps.moment.tail_sum", moments.tail_sum);
        } else {
            for (std::size_t j = 0; j < moments.modes.size(); ++j) {
                if (!moments.modes[j].finite) {
                    rec.set("check.jumps.moment.mode", static_cast<std::uint64_t>(j + 1));
                    break;
                }
            }
        }
        all = all && moments.passed();

        if (plan.jumps.tail) {
            const SeriesVerdict series = square_integrability(plan.jumps);
            rec.set("check.jumps.square_integrability", series.convergent ? "pass" : "fail");
            rec.set("check.jumps.square_integrability.declared_sum", series.declared_sum);
            if (series.convergent)
                rec.set("check.jumps.square_integrability.total", series.total());
            all = all && series.convergent;
        }
    }

    rec.set("all_passed", all);
    emit(plan, rec, "check.txt");
    return all ? 0 : 1;
}

int run_eta(const RunPlan& plan) {
    const LevyDriftCorrection corr = eta_correction(plan.jumps, plan.jumps.quad_tol);
    Record rec;
    rec.set("command", "eta");
    rec.set("modes", static_cast<std::uint64_t>(corr.eta.size()));
    rec.set("quad_tol", plan.jumps.quad_tol);
    for (std::size_t j = 0; j < corr.eta.size(); ++j) {
        rec.set("eta_" + std::to_string(j + 1), corr.eta[j]);
        rec.set("error_" + std::to_string(j + 1), corr.error[j]);
    }
    emit(plan, rec, "eta.txt");
    return 0;
}

int run_eval(const RunPlan& plan) {
    const DiscretePath path = read_path_csv(plan.eval->path);
    const ActionBreakdown bd =
        evaluate_action(path, *plan.model, *plan.drift, plan.eta, plan.form);
    Record rec;
    rec.set("command", "eval");
    rec.set("path", plan.eval->path.string());
    rec.set("intervals", static_cast<std::uint64_t>(path.intervals()));
    rec.set("modes", static_cast<std::uint64_t>(path.modes()));
    rec.set("form", plan.form == ActionForm::completed_square ? "completed-square" : "cross-term");
    rec.set("eta_source", plan.eta_source);
    rec.set("residual_term", bd.residual_term);
    rec.set("trace_term", bd.trace_term);
    rec.set("levy_cross_term", bd.levy_cross_term);
    rec.set("total", bd.total);
    emit(plan, rec, "action.txt");
    return 0;
}

int run_minimize(const RunPlan& plan) {
    std::ofstream log = open_log(plan);
    OptimizerConfig opt = plan.minimize->opt;
    if (plan.minimize->init_path_file)
        opt.init_path = read_path_csv(*plan.minimize->init_path_file);
    if (log.is_open()) {
        opt.trace = [&log](std::size_t iter, double action, double grad) {
            log << "iter " << iter << " action " << format_g17(action) << " grad "
                << format_g17(grad) << '\n';
        };
    }

    const OptimizationResult result = minimize_path(*plan.model, *plan.drift, plan.eta,
                                                    plan.minimize->start, plan.minimize->target,
                                                    opt);

    Record rec;
    rec.set("command", "minimize");
    rec.set("intervals", static_cast<std::uint64_t>(result.path.intervals()));
    rec.set("modes", static_cast<std::uint64_t>(result.path.modes()));
    rec.set("method", plan.minimize->method_name);
    rec.set("initializer", result.initializer);
    rec.set("eta_source", plan.eta_source);
    rec.set("iterations", static_cast<std::uint64_t>(result.iterations));
    rec.set("converged", result.converged);
    rec.set("gradient_norm", result.gradient_norm);
    rec.set("el_residual", result.el_residual);
    rec.set("residual_term", result.breakdown.residual_term);
    rec.set("trace_term", result.breakdown.trace_term);
    rec.set("total", result.breakdown.total);
    if (plan.write_csv) {
        write_path_csv(plan.out_dir / "mpp_path.csv", result.path);
        rec.set("path_file", "mpp_path.csv");
    }
    emit(plan, rec, "minimize.txt");
    return 0;
}

int run_simulate(const RunPlan& plan) {
    const RunPlan::Simulate& s = *plan.simulate;
    const std::size_t modes = plan.model->modes();

    SimulateOptions options;
    options.steps = s.steps;
    options.include_jumps = s.include_jumps;
    options.jump_cutoff = s.jump_cutoff;

    // Per-mode first and second moments at the middle and final grid nodes.
    const std::size_t mid_node = s.steps / 2;
    std::vector<double> sum_mid(modes, 0.0), sq_mid(modes, 0.0);
    std::vector<double> sum_end(modes, 0.0), sq_end(modes, 0.0);

    double t_mid = 0.0, t_end = 0.0;
    for (std::size_t sample = 0; sample < s.samples; ++sample) {
        options.seed = derive_seed(plan.seed, sample);
        const DiscretePath path = simulate_mild(*plan.model, *plan.drift, plan.jumps, s.x0,
                                                options);
        t_mid = path.time(mid_node);
        t_end = path.horizon();
        for (std::size_t j = 0; j < modes; ++j) {
            const double xm = path.row(mid_node)[j];
            const double xe = path.row(s.steps)[j];
            sum_mid[j] += xm;
            sq_mid[j] += xm * xm;
            sum_end[j] += xe;
            sq_end[j] += xe * xe;
        }
        if (plan.write_csv && sample < s.write_paths) {
            char name[32];
            std::snprintf(name, sizeof name, "sample_%04zu.csv", sample);
            write_path_csv(plan.out_dir / name, path);
        }
    }

    Record rec;
    rec.set("command", "simulate");
    rec.set("steps", static_cast<std::uint64_t>(s.steps));
    rec.set("samples", static_cast<std::uint64_t>(s.samples));
    rec.set("modes", static_cast<std::uint64_t>(modes));
    rec.set("include_jumps", s.include_jumps);
    if (s.include_jumps) rec.set("jump_cutoff", s.jump_cutoff);
    rec.set("t_mid", t_mid);
    rec.set("t_end", t_end);
    const double n = static_cast<double>(s.samples);
    for (std::size_t j = 0; j < modes; ++j) {
        const std::string sj = std::to_string(j + 1);
        const double mean_mid = sum_mid[j] / n;
        const double mean_end = sum_end[j] / n;
        rec.set("mean_mid_" + sj, mean_mid);
        rec.set("var_mid_" + sj, sq_mid[j] / n - mean_mid * mean_mid);
        rec.set("mean_end_" + sj, mean_end);
        rec.set("var_end_" + sj, sq_end[j] / n - mean_end * mean_end);
    }
    if (plan.write_csv)
        rec.set("paths_written", static_cast<std::uint64_t>(std::min(s.write_paths, s.samples)));
    emit(plan, rec, "simulate.txt");
    return 0;
}

int run_tube(const RunPlan& plan) {
    const RunPlan::Tube& t = *plan.tube;
    const DiscretePath path_a = read_path_csv(t.path_a);
    const DiscretePath path_b = read_path_csv(t.path_b);

    const RatioEstimate est = tube_ratio(t.experiment, *plan.model, *plan.drift, plan.jumps,
                                         path_a, path_b, plan.eta);

    Record rec;
    rec.set("command", "tube-ratio");
    rec.set("path_a", t.path_a.string());
    rec.set("path_b", t.path_b.string());
    rec.set("epsilon", est.epsilon);
    rec.set("samples", static_cast<std::uint64_t>(est.samples));
    rec.set("sim_steps", static_cast<std::uint64_t>(t.experiment.sim_steps == 0
                                                        ? path_a.intervals()
                                                        : t.experiment.sim_steps));
    rec.set("eta_source", plan.eta_source);
    rec.set("include_jumps", est.include_jumps);
    if (est.include_jumps) rec.set("jump_cutoff", est.jump_cutoff);
    rec.set("hits_a", est.hits_a);
    rec.set("hits_b", est.hits_b);
    rec.set("hits_ref", est.hits_ref);
    rec.set("gamma_a", est.gamma_a);
    rec.set("gamma_b", est.gamma_b);
    rec.set("ratio", est.ratio);
    rec.set("se_log_ratio", est.se_log_ratio);
    rec.set("se_ratio", est.se_ratio);
    rec.set("action_a", est.action_a);
    rec.set("action_b", est.action_b);
    rec.set("predicted_ratio", est.predicted_ratio);
    rec.set("low_power", est.low_power);
    rec.set("infinite_ci", est.infinite_ci);

    if (t.experiment.record_hits && plan.write_csv) {
        const std::filesystem::path hits_path = plan.out_dir / "hits.tsv";
        std::ofstream os(hits_path);
        if (!os) throw std::runtime_error("cannot open " + hits_path.string() + " for writing");
        os << "sample\thit_a\thit_b\thit_ref\n";
        for (std::size_t i = 0; i < est.hit_flags.size(); ++i) {
            const std::uint8_t f = est.hit_flags[i];
            os << i << '\t' << (f & 1) << '\t' << ((f >> 1) & 1) << '\t' << ((f >> 2) & 1)
               << '\n';
        }
        rec.set("hits_file", "hits.tsv");
    }
    emit(plan, rec, "tube.txt");
    return 0;
}

}  // namespace

int run_command(const RunPlan& plan) {
    prepare_out_dir(plan);
    if (plan.command == "check") return run_check(plan);
    if (plan.command == "eta") return run_eta(plan);
    if (plan.command == "eval") return run_eval(plan);
    if (plan.command == "minimize") return run_minimize(plan);
    if (plan.command == "simulate") return run_simulate(plan);
    if (plan.command == "tube-ratio") return run_tube(plan);
    throw std::invalid_argument("unknown command '" + plan.command + "'");
}

}  // namespace ompath::cli
