#pragma once

// Pattern CSV format:
//
//   # dim=2
//   # sim_window=-1.5:51.5,-1.5:51.5
//   x1,x2,y,z
//   0.25,3.5,1.2,1
//
// The sim_window comment is optional on input (the bounding box of the points
// is used when absent). Values are written with 17 significant digits so a
// write/read cycle reproduces every double exactly.

#include "mppstat/core.hpp"
#include "mppstat/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace mppstat {

/// Parse failure with the 1-based line number that caused it.
class PatternParseError : public InputError {
public:
    PatternParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

void write_pattern_csv(std::ostream& out, const PointPattern& pattern);
PointPattern read_pattern_csv(std::istream& in, const std::string& source = "<stream>");

void save_pattern(const std::filesystem::path& path, const PointPattern& pattern);
PointPattern load_pattern(const std::filesystem::path& path);

/// Shortest-round-trip-safe decimal text for a double (%.17g).
std::string format_double(double v);

} // namespace mppstat
