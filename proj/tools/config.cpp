#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ompath/presets.hpp"

namespace ompath::cli {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void bad_key(std::string_view key, std::string_view what) {
    throw std::invalid_argument("config key '" + std::string(key) + "': " + std::string(what));
}

}  // namespace

ConfigMap ConfigMap::load(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::invalid_argument("cannot open config file " + file.string());
    ConfigMap cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + trim(line) + "'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        if (!cfg.pairs_.emplace(std::move(key), std::move(value)).second)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": duplicate key '" + trim(line.substr(0, eq)) + "'");
    }
    return cfg;
}

bool ConfigMap::has(std::string_view key) const { return pairs_.find(key) != pairs_.end(); }

std::string ConfigMap::value_of(std::string_view key) const {
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) bad_key(key, "required but missing");
    consumed_.insert(it->first);
    return it->second;
}

std::string ConfigMap::get_string(std::string_view key) const { return value_of(key); }

std::string ConfigMap::get_string_or(std::string_view key, std::string_view fallback) const {
    return has(key) ? value_of(key) : std::string(fallback);
}

double ConfigMap::get_double(std::string_view key) const {
    const std::string v = value_of(key);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        bad_key(key, "'" + v + "' is not a number");
    }
}

double ConfigMap::get_double_or(std::string_view key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t ConfigMap::get_u64_or(std::string_view key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = value_of(key);
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("");
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        bad_key(key, "'" + v + "' is not an unsigned integer");
    }
}

std::size_t ConfigMap::get_size(std::string_view key) const {
    if (!has(key)) bad_key(key, "required but missing");
    return static_cast<std::size_t>(get_u64_or(key, 0));
}

std::size_t ConfigMap::get_size_or(std::string_view key, std::size_t fallback) const {
    return has(key) ? get_size(key) : fallback;
}

bool ConfigMap::get_bool_or(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = value_of(key);
    if (v == "true") return true;
    if (v == "false") return false;
    bad_key(key, "'" + v + "' is not true/false");
}

std::vector<double> ConfigMap::get_list(std::string_view key) const {
    const std::string v = value_of(key);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const std::size_t comma = v.find(',', pos);
        const std::string field =
            trim(std::string_view(v).substr(pos, comma == std::string::npos ? v.size() - pos
                                                                            : comma - pos));
        if (field.empty()) bad_key(key, "empty element in list '" + v + "'");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            bad_key(key, "'" + field + "' is not a number");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) bad_key(key, "empty list");
    return out;
}

void ConfigMap::reject_prefix(std::string_view prefix, std::string_view reason) const {
    for (const auto& [k, v] : pairs_) {
        if (k.size() >= prefix.size() && std::string_view(k).substr(0, prefix.size()) == prefix)
            bad_key(k, reason);
    }
}

void ConfigMap::finish(std::string_view command) const {
    for (const auto& [k, v] : pairs_) {
        if (consumed_.find(k) == consumed_.end())
            bad_key(k, "unknown key or not used by command '" + std::string(command) + "'");
    }
}

namespace {

void require_positive(double v, std::string_view key) {
    if (!(v > 0.0)) bad_key(key, "must be positive");
}

ScalarFunction scalar_from(const ConfigMap& cfg, std::string_view name_key,
                           std::string_view scale_key) {
    const std::string name = cfg.get_string(name_key);
    const double scale = cfg.get_double_or(scale_key, 1.0);
    try {
        return ScalarFunction::make(name, scale);
    } catch (const std::invalid_argument&) {
        bad_key(name_key, "unknown profile '" + name +
                              "' (zero, const, linear, tanh, sin, cubic)");
    }
}

std::vector<double> vector_or_scalar(const ConfigMap& cfg, std::string_view list_key,
                                     std::string_view scalar_key, std::size_t modes,
                                     const char* what) {
    const bool has_list = cfg.has(list_key);
    const bool has_scalar = cfg.has(scalar_key);
    if (has_list && has_scalar)
        bad_key(list_key, std::string("give either this or ") + std::string(scalar_key) +
                              ", not both");
    if (!has_list && !has_scalar)
        bad_key(list_key, std::string(what) + " required (this key or " +
                              std::string(scalar_key) + ")");
    if (has_scalar) return std::vector<double>(modes, cfg.get_double(scalar_key));
    std::vector<double> v = cfg.get_list(list_key);
    if (v.size() != modes)
        bad_key(list_key, "expected " + std::to_string(modes) + " entries, got " +
                              std::to_string(v.size()));
    return v;
}

std::optional<SpectralModel> resolve_model(const ConfigMap& cfg) {
    if (!cfg.has("model.modes")) {
        // A partial model block is a config mistake, not an absent model.
        cfg.reject_prefix("model.", "model.modes is required when a model block is given");
        return std::nullopt;
    }
    SpectralModel model;
    const std::size_t modes = cfg.get_size("model.modes");
    if (modes == 0) bad_key("model.modes", "must be at least 1");
    model.eigenvalues =
        vector_or_scalar(cfg, "model.eigenvalues", "model.lambda", modes, "eigenvalues");
    model.diffusion = vector_or_scalar(cfg, "model.diffusion", "model.b", modes, "diffusion");
    model.horizon = cfg.get_double_or("model.horizon", 1.0);
    require_positive(model.horizon, "model.horizon");
    return model;
}

std::shared_ptr<const Drift> resolve_drift(const ConfigMap& cfg, const SpectralModel& model) {
    const std::string kind = cfg.get_string_or("drift.kind", "zero");
    const std::size_t modes = model.modes();
    if (kind == "zero") return make_zero_drift(modes);
    if (kind == "diagonal-linear") {
        return make_diagonal_linear_drift(
            vector_or_scalar(cfg, "drift.coefficients", "drift.m", modes, "drift coefficients"));
    }
    if (kind == "scalar") {
        return make_scalar_mode_drift(modes, scalar_from(cfg, "drift.f", "drift.f_scale"));
    }
    if (kind == "nonlocal") {
        std::vector<double> weights;
        if (cfg.has("drift.weights")) {
            weights = cfg.get_list("drift.weights");
            if (weights.size() != modes)
                bad_key("drift.weights", "expected " + std::to_string(modes) + " entries");
        } else {
            weights.resize(modes);
            for (std::size_t j = 1; j <= modes; ++j) weights[j - 1] = cosine_average_weight(j);
        }
        const double window = cfg.get_double_or("drift.window_start", 0.5 * model.horizon);
        return make_nonlocal_rank_one_drift(std::move(weights),
                                            scalar_from(cfg, "drift.f", "drift.f_scale"), window);
    }
    bad_key("drift.kind", "unknown kind '" + kind +
                              "' (zero, diagonal-linear, scalar, nonlocal)");
}

JumpSpec resolve_jumps(const ConfigMap& cfg, std::size_t default_modes) {
    JumpSpec spec;
    spec.quad_tol = cfg.get_double_or("jumps.quad_tol", 1e-10);
    require_positive(spec.quad_tol, "jumps.quad_tol");

    const std::string kind = cfg.get_string_or("jumps.kind", "none");
    if (kind == "none") {
        cfg.reject_prefix("jumps.tail", "meaningless without jump-carrying modes");
        return spec;
    }
    if (kind != "one-sided" && kind != "two-sided")
        bad_key("jumps.kind", "unknown kind '" + kind + "' (none, one-sided, two-sided)");

    const std::size_t modes = cfg.get_size_or("jumps.modes", default_modes);
    if (modes == 0) bad_key("jumps.modes", "must be at least 1 for jump-carrying specs");

    TemperedStableComponent plus{cfg.get_double_or("jumps.c", 1.0),
                                 cfg.get_double_or("jumps.beta", 1.0),
                                 cfg.get_double_or("jumps.alpha", 0.5)};
    spec.modes.resize(modes);
    for (ModeJumps& m : spec.modes) {
        m.plus = plus;
        m.kind = JumpKind::one_sided;
    }
    if (kind == "two-sided") {
        TemperedStableComponent minus{cfg.get_double_or("jumps.c_minus", plus.c),
                                      cfg.get_double_or("jumps.beta_minus", plus.beta),
                                      cfg.get_double_or("jumps.alpha_minus", plus.alpha)};
        for (ModeJumps& m : spec.modes) {
            m.kind = JumpKind::two_sided;
            m.minus = minus;
        }
    }

    if (cfg.has("jumps.tail")) {
        const std::string tail = cfg.get_string("jumps.tail");
        TailRule rule;
        if (tail == "finite-support") {
            rule.kind = TailKind::finite_support;
        } else if (tail == "constant") {
            rule.kind = TailKind::constant;
        } else if (tail == "geometric") {
            rule.kind = TailKind::geometric;
            rule.ratio = cfg.get_double_or("jumps.tail_ratio", 0.5);
            if (!(rule.ratio > 0.0) || !(rule.ratio < 1.0))
                bad_key("jumps.tail_ratio", "must lie in (0,1)");
        } else {
            bad_key("jumps.tail",
                    "unknown rule '" + tail + "' (finite-support, constant, geometric)");
        }
        spec.tail = rule;
    }

    try {
        validate_jump_spec(spec);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("jumps block: ") + e.what());
    }
    return spec;
}

std::filesystem::path existing_file(const ConfigMap& cfg, std::string_view key) {
    const std::filesystem::path p = cfg.get_string(key);
    if (!std::filesystem::exists(p))
        bad_key(key, "file '" + p.string() + "' does not exist");
    return p;
}

}  // namespace

RunPlan resolve(const std::filesystem::path& config_file, const CliOverrides& overrides) {
    const ConfigMap cfg = ConfigMap::load(config_file);
    RunPlan plan;

    plan.command = overrides.command;
    if (cfg.has("command")) {
        const std::string configured = cfg.get_string("command");
        if (configured != plan.command)
            bad_key("command", "config says '" + configured + "' but the command line ran '" +
                                   plan.command + "'");
    }

    // read config values unconditionally so a CLI override still marks the
    // config key as consumed, then let the flag win
    plan.seed = cfg.get_u64_or("seed", 0);
    if (overrides.seed) plan.seed = *overrides.seed;
    const std::uint64_t threads_cfg = cfg.get_u64_or("threads", 1);
    if (threads_cfg == 0) bad_key("threads", "must be at least 1");
    plan.threads = overrides.threads ? *overrides.threads : static_cast<unsigned>(threads_cfg);
    if (plan.threads == 0) throw std::invalid_argument("--threads must be at least 1");
    plan.out_dir = std::filesystem::path(cfg.get_string_or("output.dir", "out"));
    if (overrides.out_dir) plan.out_dir = *overrides.out_dir;
    plan.log_file = overrides.log_file;

    {
        const std::string formats = cfg.get_string_or("output.formats", "record,csv");
        plan.write_record = plan.write_csv = false;
        std::size_t pos = 0;
        while (pos <= formats.size()) {
            const std::size_t comma = formats.find(',', pos);
            const std::string tok = trim(std::string_view(formats).substr(
                pos, comma == std::string::npos ? formats.size() - pos : comma - pos));
            if (tok == "record")
                plan.write_record = true;
            else if (tok == "csv")
                plan.write_csv = true;
            else
                bad_key("output.formats", "unknown format '" + tok + "' (record, csv)");
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    // Presets either build the whole model (heat-nonlocal) or just the jump
    // spec (tempered-*); the blocks they replace must stay empty.
    plan.preset_name = cfg.get_string_or("preset", "");
    if (plan.preset_name == "heat-nonlocal") {
        cfg.reject_prefix("model.", "the heat-nonlocal preset defines the model block");
        cfg.reject_prefix("drift.", "the heat-nonlocal preset defines the drift block");
        cfg.reject_prefix("jumps.", "the heat-nonlocal preset defines the jumps block");
        const std::size_t modes = cfg.get_size_or("preset.modes", 4);
        if (modes == 0) bad_key("preset.modes", "must be at least 1");
        NonlocalHeatModel preset = heat_nonlocal_preset(
            modes, scalar_from(cfg, "preset.f", "preset.f_scale"),
            cfg.get_double_or("preset.c", 1.0), cfg.get_double_or("preset.beta", 1.0),
            cfg.get_double_or("preset.alpha", 0.5), cfg.get_double_or("preset.horizon", 1.0));
        plan.model = std::move(preset.model);
        plan.drift = std::move(preset.drift);
        plan.jumps = std::move(preset.jumps);
        plan.jumps.quad_tol = cfg.get_double_or("preset.quad_tol", 1e-10);
        require_positive(plan.jumps.quad_tol, "preset.quad_tol");
    } else if (plan.preset_name == "tempered-one-sided" || plan.preset_name == "tempered-two-sided") {
        cfg.reject_prefix("jumps.", "the tempered presets define the jumps block");
        plan.model = resolve_model(cfg);
        const std::size_t modes =
            cfg.get_size_or("preset.modes", plan.model ? plan.model->modes() : 1);
        if (modes == 0) bad_key("preset.modes", "must be at least 1");
        const double c = cfg.get_double_or("preset.c", 1.0);
        const double beta = cfg.get_double_or("preset.beta", 1.0);
        const double alpha = cfg.get_double_or("preset.alpha", 0.5);
        try {
            plan.jumps =
                plan.preset_name == "tempered-one-sided"
                    ? one_sided_jumps_preset(modes, c, beta, alpha)
                    : two_sided_jumps_preset(modes, c, beta, alpha,
                                             cfg.get_double_or("preset.c_minus", c),
                                             cfg.get_double_or("preset.beta_minus", beta),
                                             cfg.get_double_or("preset.alpha_minus", alpha));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("preset block: ") + e.what());
        }
        plan.jumps.quad_tol = cfg.get_double_or("preset.quad_tol", 1e-10);
        require_positive(plan.jumps.quad_tol, "preset.quad_tol");
        if (plan.model) plan.drift = resolve_drift(cfg, *plan.model);
    } else if (!plan.preset_name.empty()) {
        bad_key("preset", "unknown preset '" + plan.preset_name +
                              "' (heat-nonlocal, tempered-one-sided, tempered-two-sided)");
    } else {
        plan.model = resolve_model(cfg);
        if (plan.model) {
            plan.drift = resolve_drift(cfg, *plan.model);
            plan.jumps = resolve_jumps(cfg, plan.model->modes());
        } else {
            plan.jumps = resolve_jumps(cfg, 0);
        }
    }

    const bool needs_model = plan.command != "eta";
    if (needs_model && !plan.model)
        throw std::invalid_argument("command '" + plan.command +
                                    "' needs a model block (model.modes = ...) or the "
                                    "heat-nonlocal preset");
    if (plan.command == "eta" && !plan.jumps.any())
        throw std::invalid_argument(
            "command 'eta' needs jump-carrying modes (jumps.kind or a tempered preset)");
    if (plan.model && plan.jumps.size() > plan.model->modes())
        bad_key("jumps.modes", "more jump modes than model modes");

    // The action's small-jump mean. "computed" may legitimately fail the
    // moment precondition, which surfaces as a precondition error, not a
    // config error.
    const bool uses_eta =
        plan.command == "eval" || plan.command == "minimize" || plan.command == "tube-ratio";
    if (uses_eta) {
        plan.eta_source =
            cfg.get_string_or("action.eta_source", plan.jumps.any() ? "computed" : "none");
        if (plan.eta_source == "none") {
            plan.eta.clear();
        } else if (plan.eta_source == "computed") {
            const LevyDriftCorrection corr = eta_correction(plan.jumps, plan.jumps.quad_tol);
            plan.eta = corr.eta;
            plan.eta.resize(plan.model->modes(), 0.0);
        } else if (plan.eta_source == "explicit") {
            plan.eta = cfg.get_list("action.eta");
            if (plan.eta.size() != plan.model->modes())
                bad_key("action.eta", "expected " + std::to_string(plan.model->modes()) +
                                          " entries (one per mode)");
        } else {
            bad_key("action.eta_source",
                    "unknown source '" + plan.eta_source + "' (none, computed, explicit)");
        }
    }

    if (plan.command == "eval") {
        const std::string form = cfg.get_string_or("action.form", "completed-square");
        if (form == "completed-square")
            plan.form = ActionForm::completed_square;
        else if (form == "cross-term")
            plan.form = ActionForm::cross_term;
        else
            bad_key("action.form", "unknown form '" + form + "' (completed-square, cross-term)");
        plan.eval = RunPlan::Eval{existing_file(cfg, "eval.path")};
    } else if (plan.command == "minimize") {
        RunPlan::Minimize m;
        const std::size_t modes = plan.model->modes();
        m.start = cfg.has("minimize.start") ? cfg.get_list("minimize.start")
                                            : std::vector<double>(modes, 0.0);
        m.target = cfg.get_list("minimize.target");
        if (m.start.size() != modes) bad_key("minimize.start", "one entry per mode expected");
        if (m.target.size() != modes) bad_key("minimize.target", "one entry per mode expected");
        m.opt.intervals = cfg.get_size_or("minimize.intervals", 64);
        if (m.opt.intervals < 2) bad_key("minimize.intervals", "must be at least 2");
        m.opt.max_iters = cfg.get_size_or("minimize.max_iters", 5000);
        m.opt.grad_tol = cfg.get_double_or("minimize.grad_tol", 1e-8);
        require_positive(m.opt.grad_tol, "minimize.grad_tol");
        m.method_name = cfg.get_string_or("minimize.method", "lbfgs");
        if (m.method_name == "lbfgs")
            m.opt.method = StepMethod::lbfgs;
        else if (m.method_name == "gradient-descent")
            m.opt.method = StepMethod::gradient_descent;
        else
            bad_key("minimize.method",
                    "unknown method '" + m.method_name + "' (lbfgs, gradient-descent)");
        m.opt.memory = cfg.get_size_or("minimize.memory", 10);
        if (cfg.has("minimize.init_path"))
            m.init_path_file = existing_file(cfg, "minimize.init_path");
        plan.minimize = std::move(m);
    } else if (plan.command == "simulate") {
        RunPlan::Simulate s;
        const std::size_t modes = plan.model->modes();
        s.steps = cfg.get_size_or("simulate.steps", 64);
        if (s.steps < 2) bad_key("simulate.steps", "must be at least 2");
        s.samples = cfg.get_size_or("simulate.samples", 1);
        if (s.samples == 0) bad_key("simulate.samples", "must be at least 1");
        s.write_paths = cfg.get_size_or("simulate.write_paths", 1);
        if (s.write_paths > s.samples)
            bad_key("simulate.write_paths", "cannot exceed simulate.samples");
        s.x0 = cfg.has("simulate.x0") ? cfg.get_list("simulate.x0")
                                      : std::vector<double>(modes, 0.0);
        if (s.x0.size() != modes) bad_key("simulate.x0", "one entry per mode expected");
        s.include_jumps = cfg.get_bool_or("simulate.include_jumps", false);
        s.jump_cutoff = cfg.get_double_or("simulate.jump_cutoff", 0.05);
        if (s.include_jumps && (!(s.jump_cutoff > 0.0) || !(s.jump_cutoff < 1.0)))
            bad_key("simulate.jump_cutoff", "must lie in (0,1)");
        plan.simulate = std::move(s);
    } else if (plan.command == "tube-ratio") {
        RunPlan::Tube t;
        t.path_a = existing_file(cfg, "tube.path_a");
        t.path_b = existing_file(cfg, "tube.path_b");
        t.experiment.epsilon = cfg.get_double_or("tube.epsilon", 0.1);
        require_positive(t.experiment.epsilon, "tube.epsilon");
        t.experiment.num_samples = cfg.get_size_or("tube.samples", 100000);
        if (t.experiment.num_samples == 0) bad_key("tube.samples", "must be at least 1");
        t.experiment.sim_steps = cfg.get_size_or("tube.sim_steps", 0);
        t.experiment.include_jumps = cfg.get_bool_or("tube.include_jumps", false);
        t.experiment.jump_cutoff = cfg.get_double_or("tube.jump_cutoff", 0.05);
        if (t.experiment.include_jumps &&
            (!(t.experiment.jump_cutoff > 0.0) || !(t.experiment.jump_cutoff < 1.0)))
            bad_key("tube.jump_cutoff", "must lie in (0,1)");
        t.experiment.record_hits = cfg.get_bool_or("tube.record_hits", false);
        t.experiment.seed = plan.seed;
        t.experiment.threads = plan.threads;
        plan.tube = std::move(t);
    } else if (plan.command != "check" && plan.command != "eta") {
        throw std::invalid_argument("unknown command '" + plan.command + "'");
    }

    cfg.finish(plan.command);
    return plan;
}

}  // namespace ompath::cli
