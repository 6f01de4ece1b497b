#pragma once

// Spawns the CLI binary for integration tests. OMPATH_CLI_PATH is injected by
// the build as the absolute path of the ompath tool.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ompath/io.hpp"

namespace proc {

namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("ompath-test-" + std::to_string(::getpid()) + "-" + tag + "-" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

inline void write_file(const fs::path& file, const std::string& content) {
    std::ofstream out(file);
    out << content;
}

inline std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the CLI with `args` from inside `dir`; captures exit code and streams.
inline RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = "cd " + dir.string() + " && " + OMPATH_CLI_PATH + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (status != -1 && WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

inline std::map<std::string, std::string> record_map(const fs::path& file) {
    std::ifstream in(file);
    std::map<std::string, std::string> m;
    for (const auto& [k, v] : ompath::Record::parse(in)) m[k] = v;
    return m;
}

inline double record_double(const std::map<std::string, std::string>& m, const std::string& key) {
    return std::strtod(m.at(key).c_str(), nullptr);
}

}  // namespace proc
