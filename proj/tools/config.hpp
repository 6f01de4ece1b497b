#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ompath/action.hpp"
#include "ompath/levy.hpp"
#include "ompath/mc.hpp"
#include "ompath/pathopt.hpp"
#include "ompath/spectral.hpp"

namespace ompath::cli {

/// Key-value config file: one "dotted.key = value" per line, '#' comments,
/// blank lines ignored. Keys are consumed by the resolver for the active
/// command; a key the command does not consume is rejected by name, so typos
/// and stale blocks cannot silently change a run.
class ConfigMap {
public:
    static ConfigMap load(const std::filesystem::path& file);

    bool has(std::string_view key) const;

    std::string get_string(std::string_view key) const;          // required
    std::string get_string_or(std::string_view key, std::string_view fallback) const;
    double get_double(std::string_view key) const;
    double get_double_or(std::string_view key, double fallback) const;
    std::uint64_t get_u64_or(std::string_view key, std::uint64_t fallback) const;
    std::size_t get_size(std::string_view key) const;
    std::size_t get_size_or(std::string_view key, std::size_t fallback) const;
    bool get_bool_or(std::string_view key, bool fallback) const;
    std::vector<double> get_list(std::string_view key) const;

    /// Fails with the offending key name if any key with this prefix exists.
    void reject_prefix(std::string_view prefix, std::string_view reason) const;

    /// Fails if any key was never consumed by a getter.
    void finish(std::string_view command) const;

private:
    std::string value_of(std::string_view key) const;

    std::map<std::string, std::string, std::less<>> pairs_;
    mutable std::set<std::string, std::less<>> consumed_;
};

struct CliOverrides {
    std::string command;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::filesystem::path> log_file;
};

/// Everything a command needs, resolved and validated at parse time.
struct RunPlan {
    std::string command;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::filesystem::path out_dir = "out";
    bool write_record = true;
    bool write_csv = true;
    std::optional<std::filesystem::path> log_file;

    std::string preset_name;  // empty when no preset
    std::optional<SpectralModel> model;
    std::shared_ptr<const Drift> drift;
    JumpSpec jumps;
    ActionForm form = ActionForm::completed_square;
    std::string eta_source;    // none | computed | explicit
    std::vector<double> eta;   // padded to model modes; empty means zero

    struct Eval {
        std::filesystem::path path;
    };
    struct Minimize {
        std::vector<double> start, target;
        OptimizerConfig opt;
        std::optional<std::filesystem::path> init_path_file;
        std::string method_name;
    };
    struct Simulate {
        std::size_t steps = 64;
        std::size_t samples = 1;
        std::size_t write_paths = 1;
        std::vector<double> x0;
        bool include_jumps = false;
        double jump_cutoff = 0.05;
    };
    struct Tube {
        std::filesystem::path path_a, path_b;
        TubeExperiment experiment;
    };
    std::optional<Eval> eval;
    std::optional<Minimize> minimize;
    std::optional<Simulate> simulate;
    std::optional<Tube> tube;
};

/// Loads, resolves and validates the config for the overrides' command.
/// Throws std::invalid_argument (config errors, exit 2) or, from eta
/// computation, precondition_error (exit 1).
RunPlan resolve(const std::filesystem::path& config_file, const CliOverrides& overrides);

/// Executes the plan; returns the process exit status.
int run_command(const RunPlan& plan);

}  // namespace ompath::cli
