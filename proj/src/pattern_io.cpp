#include "mppstat/pattern_io.hpp"

#include "mppstat/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mppstat {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& source, std::size_t line) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty()) {
        throw PatternParseError(source, line, "cannot parse number '" + t + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

} // namespace

PatternParseError::PatternParseError(const std::string& source, std::size_t line, const std::string& what)
    : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
    const std::size_t d = pattern.dim();
    out << "# dim=" << d << '\n';
    out << "# sim_window=";
    for (std::size_t k = 0; k < d; ++k) {
        if (k) out << ',';
        out << format_double(pattern.sim_window().lo[k]) << ':' << format_double(pattern.sim_window().hi[k]);
    }
    out << '\n';
    for (std::size_t k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
    out << "y,z\n";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        for (double c : pattern.location(i)) out << format_double(c) << ',';
        out << format_double(pattern.y(i)) << ',' << format_double(pattern.z(i)) << '\n';
    }
}

PointPattern read_pattern_csv(std::istream& in, const std::string& source) {
    std::size_t dim = 0;
    bool have_window = false;
    Box window;
    std::vector<double> coords;
    std::vector<double> y;
    std::vector<double> z;

    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s[0] == '#') {
            const std::string body = trim(s.substr(1));
            if (body.rfind("dim=", 0) == 0) {
                const double d = parse_double(body.substr(4), source, line);
                if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) {
                    throw PatternParseError(source, line, "dim must be a positive integer");
                }
                dim = static_cast<std::size_t>(d);
            } else if (body.rfind("sim_window=", 0) == 0) {
                for (const std::string& axis : split(body.substr(11), ',')) {
                    const auto parts = split(axis, ':');
                    if (parts.size() != 2) throw PatternParseError(source, line, "malformed sim_window axis '" + axis + "'");
                    window.lo.push_back(parse_double(parts[0], source, line));
                    window.hi.push_back(parse_double(parts[1], source, line));
                }
                have_window = true;
            }
            continue;
        }
        if (dim == 0) throw PatternParseError(source, line, "missing '# dim=d' header before data");
        if (s[0] == 'x' || s[0] == 'X') continue; // column header
        const auto fields = split(s, ',');
        if (fields.size() != dim + 2) {
            throw PatternParseError(source, line,
                                    "expected " + std::to_string(dim + 2) + " columns, got " + std::to_string(fields.size()));
        }
        for (std::size_t k = 0; k < dim; ++k) coords.push_back(parse_double(fields[k], source, line));
        y.push_back(parse_double(fields[dim], source, line));
        z.push_back(parse_double(fields[dim + 1], source, line));
    }
    if (dim == 0) throw PatternParseError(source, line, "missing '# dim=d' header");
    if (!have_window) {
        window = Box::cube(dim, 0.0, 0.0);
        for (std::size_t k = 0; k < dim; ++k) {
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double c = coords[i * dim + k];
                if (i == 0 || c < window.lo[k]) window.lo[k] = c;
                if (i == 0 || c > window.hi[k]) window.hi[k] = c;
            }
        }
    }
    if (window.dim() != dim) throw PatternParseError(source, line, "sim_window dimension does not match dim");
    try {
        return PointPattern(dim, std::move(window), std::move(coords), std::move(y), std::move(z));
    } catch (const InputError& e) {
        throw PatternParseError(source, line, e.what());
    }
}

void save_pattern(const std::filesystem::path& path, const PointPattern& pattern) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    write_pattern_csv(out, pattern);
    if (!out) throw InputError("write to '" + path.string() + "' failed");
}

PointPattern load_pattern(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return read_pattern_csv(in, path.string());
}

} // namespace mppstat
