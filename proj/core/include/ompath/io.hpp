#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ompath/path.hpp"

namespace ompath {

/// 17-significant-digit decimal rendering (%.17g): round-trips every double
/// exactly, and is the fixed formatting of all numeric output, so identical
/// runs produce byte-identical files.
std::string format_g17(double value);

/// Path CSV: header "t, mode_1, ..., mode_M", one row per grid node, fields
/// in format_g17 separated by ", ". Readers split on commas, ignore
/// surrounding spaces, require the exact header names, and verify the time
/// column is a uniform grid.
void write_path_csv(std::ostream& os, const DiscretePath& path);
void write_path_csv(const std::filesystem::path& file, const DiscretePath& path);
DiscretePath read_path_csv(std::istream& is);
DiscretePath read_path_csv(const std::filesystem::path& file);

/// Line-delimited "key = value" record with insertion order preserved;
/// doubles in format_g17. The stable output format of every CLI command.
class Record {
public:
    void set(std::string_view key, double value);
    void set(std::string_view key, std::int64_t value);
    void set(std::string_view key, std::uint64_t value);
    void set(std::string_view key, bool value);
    void set(std::string_view key, std::string_view value);
    // keeps string literals away from the bool overload
    void set(std::string_view key, const char* value) { set(key, std::string_view(value)); }

    std::string str() const;
    void save(const std::filesystem::path& file) const;

    /// Parses a record written by save(); later duplicates win.
    static std::vector<std::pair<std::string, std::string>> parse(std::istream& is);

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace ompath
