#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "ompath/io.hpp"
#include "ompath/path.hpp"
#include "support/proc.hpp"

// End-to-end coverage of the command-line contract: exit codes (0 success,
// 1 precondition violation, 2 config error), error messages that name the
// offending key, and byte-identical reruns for identical config + seed.

using proc::fresh_dir;
using proc::record_double;
using proc::record_map;
using proc::run_cli;
using proc::slurp;
using proc::write_file;

namespace {

void write_ramp_csv(const std::filesystem::path& file, std::size_t intervals, double target) {
    ompath::DiscretePath path(intervals, 1.0, {0.0}, {target});
    ompath::write_path_csv(file, path);
}

}  // namespace

TEST_CASE("eval reproduces the linear-ramp action") {
    auto dir = fresh_dir("eval");
    write_ramp_csv(dir / "ramp.csv", 64, 1.0);
    write_file(dir / "eval.cfg",
               "model.modes = 1\n"
               "model.lambda = 1\n"
               "model.b = 1\n"
               "eval.path = ramp.csv\n");
    auto r = run_cli("eval --config eval.cfg --out out", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("total = ") != std::string::npos);

    auto rec = record_map(dir / "out" / "action.txt");
    CHECK(rec.at("command") == "eval");
    CHECK(rec.at("form") == "completed-square");
    CHECK(rec.at("eta_source") == "none");
    CHECK(std::abs(record_double(rec, "total") - 7.0 / 6.0) < 1e-3);
    CHECK(record_double(rec, "trace_term") == 0.0);
}

TEST_CASE("minimize converges and survives an eval round trip") {
    auto dir = fresh_dir("minimize");
    write_file(dir / "min.cfg",
               "model.modes = 1\n"
               "model.lambda = 1\n"
               "model.b = 1\n"
               "minimize.target = 1\n");
    auto r = run_cli("minimize --config min.cfg --out out1", dir);
    REQUIRE(r.exit_code == 0);

    auto rec = record_map(dir / "out1" / "minimize.txt");
    CHECK(rec.at("converged") == "true");
    CHECK(rec.at("method") == "lbfgs");
    CHECK(rec.at("initializer") == "linear-interpolation");
    CHECK(std::stoull(rec.at("iterations")) <= 2000);
    CHECK(record_double(rec, "gradient_norm") <= 1e-8);
    CHECK(rec.at("path_file") == "mpp_path.csv");

    // the produced path matches the boundary-value solution
    ompath::DiscretePath path = ompath::read_path_csv(dir / "out1" / "mpp_path.csv");
    REQUIRE(path.intervals() == 64);
    double sup = 0.0;
    for (std::size_t i = 0; i <= 64; ++i) {
        const double t = static_cast<double>(i) / 64.0;
        sup = std::max(sup, std::abs(path.row(i)[0] - std::sinh(t) / std::sinh(1.0)));
    }
    CHECK(sup < 1e-3);

    // feeding the minimizer's own path back through eval reproduces its action
    write_file(dir / "roundtrip.cfg",
               "model.modes = 1\n"
               "model.lambda = 1\n"
               "model.b = 1\n"
               "eval.path = out1/mpp_path.csv\n");
    auto r2 = run_cli("eval --config roundtrip.cfg --out out2", dir);
    REQUIRE(r2.exit_code == 0);
    auto eval_rec = record_map(dir / "out2" / "action.txt");
    CHECK(std::abs(record_double(eval_rec, "total") - record_double(rec, "total")) <= 1e-12);

    SUBCASE("reruns are byte-identical") {
        auto r3 = run_cli("minimize --config min.cfg --out out3", dir);
        REQUIRE(r3.exit_code == 0);
        CHECK(slurp(dir / "out3" / "minimize.txt") == slurp(dir / "out1" / "minimize.txt"));
        CHECK(slurp(dir / "out3" / "mpp_path.csv") == slurp(dir / "out1" / "mpp_path.csv"));
    }

    SUBCASE("record-only output skips the path file") {
        write_file(dir / "rec.cfg",
                   "model.modes = 1\n"
                   "model.lambda = 1\n"
                   "model.b = 1\n"
                   "minimize.target = 1\n"
                   "output.formats = record\n");
        auto r4 = run_cli("minimize --config rec.cfg --out out4", dir);
        REQUIRE(r4.exit_code == 0);
        CHECK_FALSE(std::filesystem::exists(dir / "out4" / "mpp_path.csv"));
        CHECK(record_map(dir / "out4" / "minimize.txt").count("path_file") == 0);
    }

    SUBCASE("optimization trace streams to the log file") {
        auto r5 = run_cli("minimize --config min.cfg --out out5 --log trace.log", dir);
        REQUIRE(r5.exit_code == 0);
        const std::string log = slurp(dir / "trace.log");
        CHECK(log.rfind("iter 0 action ", 0) == 0);
        const std::size_t lines = static_cast<std::size_t>(
            std::count(log.begin(), log.end(), '\n'));
        auto rec5 = record_map(dir / "out5" / "minimize.txt");
        CHECK(lines == std::stoull(rec5.at("iterations")) + 1);
    }
}

TEST_CASE("eta command computes the drift correction without a model") {
    auto dir = fresh_dir("eta");
    write_file(dir / "eta.cfg",
               "jumps.kind = one-sided\n"
               "jumps.modes = 2\n");
    auto r = run_cli("eta --config eta.cfg --out out", dir);
    REQUIRE(r.exit_code == 0);
    auto rec = record_map(dir / "out" / "eta.txt");
    const double expected = std::sqrt(std::numbers::pi) * std::erf(1.0);
    CHECK(std::abs(record_double(rec, "eta_1") - expected) <= 1e-8);
    CHECK(rec.at("eta_1") == rec.at("eta_2"));
    CHECK(record_double(rec, "error_1") <= record_double(rec, "quad_tol"));

    SUBCASE("divergent small jumps are a precondition violation") {
        write_file(dir / "bad.cfg",
                   "jumps.kind = one-sided\n"
                   "jumps.modes = 1\n"
                   "jumps.alpha = 1.5\n");
        auto bad = run_cli("eta --config bad.cfg --out out_bad", dir);
        CHECK(bad.exit_code == 1);
        CHECK(bad.err.find("precondition violated") != std::string::npos);
        CHECK(bad.err.find("mode 1") != std::string::npos);
    }
}

TEST_CASE("check reports hypothesis failures and exits nonzero") {
    auto dir = fresh_dir("check");
    write_file(dir / "good.cfg",
               "model.modes = 2\n"
               "model.eigenvalues = 1, 4\n"
               "model.b = 1\n"
               "jumps.kind = one-sided\n"
               "jumps.tail = geometric\n"
               "jumps.tail_ratio = 0.5\n");
    auto good = run_cli("check --config good.cfg --out out_good", dir);
    CHECK(good.exit_code == 0);
    auto rec = record_map(dir / "out_good" / "check.txt");
    CHECK(rec.at("all_passed") == "true");
    CHECK(rec.at("check.eigenvalues.monotone") == "pass");
    CHECK(rec.at("check.jumps.moment") == "pass");
    CHECK(rec.at("check.jumps.square_integrability") == "pass");

    write_file(dir / "bad.cfg",
               "model.modes = 2\n"
               "model.eigenvalues = 3, 1\n"
               "model.b = 1\n");
    auto bad = run_cli("check --config bad.cfg --out out_bad", dir);
    CHECK(bad.exit_code == 1);
    auto bad_rec = record_map(dir / "out_bad" / "check.txt");
    CHECK(bad_rec.at("all_passed") == "false");
    CHECK(bad_rec.at("check.eigenvalues.monotone") == "fail");
    CHECK(bad_rec.count("check.eigenvalues.monotone.mode") == 1);
}

TEST_CASE("simulate writes trajectories and sane moments") {
    auto dir = fresh_dir("simulate");
    write_file(dir / "sim.cfg",
               "model.modes = 1\n"
               "model.lambda = 1\n"
               "model.b = 1\n"
               "simulate.steps = 16\n"
               "simulate.samples = 300\n"
               "simulate.write_paths = 2\n"
               "simulate.x0 = 1\n"
               "seed = 12\n");
    auto r = run_cli("simulate --config sim.cfg --out out", dir);
    REQUIRE(r.exit_code == 0);
    auto rec = record_map(dir / "out" / "simulate.txt");
    CHECK(rec.at("t_mid") == "0.5");
    CHECK(rec.at("t_end") == "1");
    CHECK(rec.at("paths_written") == "2");
    CHECK(std::abs(record_double(rec, "mean_end_1") - std::exp(-1.0)) < 0.15);
    CHECK(record_double(rec, "var_end_1") > 0.2);
    CHECK(std::filesystem::exists(dir / "out" / "sample_0000.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "sample_0001.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "out" / "sample_0002.csv"));

    ompath::DiscretePath sample = ompath::read_path_csv(dir / "out" / "sample_0000.csv");
    CHECK(sample.intervals() == 16);
    CHECK(sample.start()[0] == 1.0);
}

TEST_CASE("tube-ratio honors seeds, threads, and overrides") {
    auto dir = fresh_dir("tube");
    write_ramp_csv(dir / "pa.csv", 20, 0.0);
    write_ramp_csv(dir / "pb.csv", 20, 0.2);
    write_file(dir / "tube.cfg",
               "model.modes = 1\n"
               "model.lambda = 1\n"
               "model.b = 1\n"
               "tube.path_a = pa.csv\n"
               "tube.path_b = pb.csv\n"
               "tube.epsilon = 0.3\n"
               "tube.samples = 20000\n"
               "seed = 7\n");

    auto r1 = run_cli("tube-ratio --config tube.cfg --out out1", dir);
    REQUIRE(r1.exit_code == 0);
    auto rec = record_map(dir / "out1" / "tube.txt");
    CHECK(rec.at("low_power") == "false");
    CHECK(std::stoull(rec.at("hits_a")) == std::stoull(rec.at("hits_ref")));
    CHECK(record_double(rec, "predicted_ratio") > 1.0);

    auto r2 = run_cli("tube-ratio --config tube.cfg --out out2", dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "out2" / "tube.txt") == slurp(dir / "out1" / "tube.txt"));

    auto r3 = run_cli("tube-ratio --config tube.cfg --out out3 --threads 2", dir);
    REQUIRE(r3.exit_code == 0);
    CHECK(slurp(dir / "out3" / "tube.txt") == slurp(dir / "out1" / "tube.txt"));

    auto r4 = run_cli("tube-ratio --config tube.cfg --out out4 --seed 8", dir);
    REQUIRE(r4.exit_code == 0);
    CHECK(slurp(dir / "out4" / "tube.txt") != slurp(dir / "out1" / "tube.txt"));
}

TEST_CASE("config errors exit with code 2 and name the key") {
    auto dir = fresh_dir("cfgerr");
    write_ramp_csv(dir / "ramp.csv", 8, 1.0);

    SUBCASE("missing config file") {
        auto r = run_cli("eval --config nowhere.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("config error") != std::string::npos);
    }
    SUBCASE("unknown key") {
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\n"
                   "eval.path = ramp.csv\nmodle.extra = 1\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("modle.extra") != std::string::npos);
    }
    SUBCASE("key for a different command") {
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\n"
                   "eval.path = ramp.csv\nminimize.target = 1\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("minimize.target") != std::string::npos);
    }
    SUBCASE("duplicate key") {
        write_file(dir / "c.cfg", "model.modes = 1\nmodel.modes = 2\n");
        auto r = run_cli("check --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("model.modes") != std::string::npos);
    }
    SUBCASE("command mismatch") {
        write_file(dir / "c.cfg",
                   "command = eval\nmodel.modes = 1\nmodel.lambda = 1\nmodel.b = 1\n"
                   "eval.path = ramp.csv\n");
        auto r = run_cli("minimize --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("command") != std::string::npos);
    }
    SUBCASE("missing required key") {
        write_file(dir / "c.cfg", "model.lambda = 1\nmodel.b = 1\neval.path = ramp.csv\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("model.modes") != std::string::npos);
    }
    SUBCASE("referenced file must exist at parse time") {
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\neval.path = ghost.csv\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("eval.path") != std::string::npos);
    }
    SUBCASE("malformed path CSV") {
        write_file(dir / "bad.csv", "t, amplitude\n0, 0\n0.5, 1\n1, 2\n");
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\neval.path = bad.csv\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("mode_1") != std::string::npos);
    }
    SUBCASE("bad enum value") {
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\n"
                   "eval.path = ramp.csv\naction.form = quadratic\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("action.form") != std::string::npos);
    }
    SUBCASE("zero threads") {
        write_file(dir / "c.cfg",
                   "model.modes = 1\nmodel.lambda = 1\nmodel.b = 1\n"
                   "eval.path = ramp.csv\nthreads = 0\n");
        auto r = run_cli("eval --config c.cfg", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("threads") != std::string::npos);
    }
}

TEST_CASE("argument parsing errors") {
    auto dir = fresh_dir("args");
    CHECK(run_cli("--help", dir).exit_code == 0);
    CHECK(run_cli("", dir).exit_code == 2);                       // a command is required
    CHECK(run_cli("transmogrify --config x.cfg", dir).exit_code == 2);
    CHECK(run_cli("eval", dir).exit_code == 2);                   // --config is required
    CHECK(run_cli("eval --config a.cfg --frobnicate", dir).exit_code == 2);
}
