#include "ompath/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ompath {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_path_csv(std::ostream& os, const DiscretePath& path) {
    os << "t";
    for (std::size_t j = 1; j <= path.modes(); ++j) os << ", mode_" << j;
    os << '\n';
    for (std::size_t i = 0; i <= path.intervals(); ++i) {
        os << format_g17(path.time(i));
        for (double v : path.row(i)) os << ", " << format_g17(v);
        os << '\n';
    }
}

void write_path_csv(const std::filesystem::path& file, const DiscretePath& path) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    write_path_csv(os, path);
    if (!os) throw std::runtime_error("write to " + file.string() + " failed");
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(trim(std::string_view(line).substr(pos)));
            return fields;
        }
        fields.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
        pos = comma + 1;
    }
}

double parse_double(const std::string& field, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("path csv: line " + std::to_string(line_no) +
                                    ": cannot parse '" + field + "' as a number");
    }
}

}  // namespace

DiscretePath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("path csv: empty input");
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 2 || header[0] != "t")
        throw std::invalid_argument("path csv: header must be t, mode_1, ..., mode_M");
    const std::size_t modes = header.size() - 1;
    for (std::size_t j = 1; j <= modes; ++j)
        if (header[j] != "mode_" + std::to_string(j))
            throw std::invalid_argument("path csv: header column " + std::to_string(j + 1) +
                                        " must be mode_" + std::to_string(j));

    std::vector<double> times;
    std::vector<double> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != modes + 1)
            throw std::invalid_argument("path csv: line " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(modes + 1));
        times.push_back(parse_double(fields[0], line_no));
        for (std::size_t j = 1; j <= modes; ++j) rows.push_back(parse_double(fields[j], line_no));
    }
    if (times.size() < 2) throw std::invalid_argument("path csv: at least two rows are required");

    const std::size_t intervals = times.size() - 1;
    const double horizon = times.back();
    if (!(horizon > 0.0)) throw std::invalid_argument("path csv: final time must be positive");
    if (times.front() != 0.0) throw std::invalid_argument("path csv: time must start at 0");
    const double dt = horizon / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        if (std::abs(times[i] - static_cast<double>(i) * dt) > 1e-9 * std::max(1.0, horizon))
            throw std::invalid_argument("path csv: time column is not a uniform grid");
    }
    return DiscretePath::from_coefficients(intervals, horizon, modes, std::move(rows));
}

DiscretePath read_path_csv(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::invalid_argument("cannot open " + file.string());
    return read_path_csv(is);
}

void Record::set(std::string_view key, double value) { set(key, std::string_view(format_g17(value))); }
void Record::set(std::string_view key, std::int64_t value) {
    set(key, std::string_view(std::to_string(value)));
}
void Record::set(std::string_view key, std::uint64_t value) {
    set(key, std::string_view(std::to_string(value)));
}
void Record::set(std::string_view key, bool value) {
    set(key, std::string_view(value ? "true" : "false"));
}

void Record::set(std::string_view key, std::string_view value) {
    for (auto& [k, v] : fields_) {
        if (k == key) {
            v = std::string(value);
            return;
        }
    }
    fields_.emplace_back(std::string(key), std::string(value));
}

std::string Record::str() const {
    std::string out;
    for (const auto& [k, v] : fields_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

void Record::save(const std::filesystem::path& file) const {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os << str();
    if (!os) throw std::runtime_error("write to " + file.string() + " failed");
}

std::vector<std::pair<std::string, std::string>> Record::parse(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> fields;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("record: line without '=': " + line);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        bool replaced = false;
        for (auto& [k, v] : fields) {
            if (k == key) {
                v = value;
                replaced = true;
                break;
            }
        }
        if (!replaced) fields.emplace_back(key, value);
    }
    return fields;
}

}  // namespace ompath
