#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "facloc/geometry.hpp"

namespace facloc {

struct ParseError : std::runtime_error {
  ParseError(std::size_t line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
  std::size_t line;
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Point CSV: header `x,y`, one pair per row, coordinates in [0,1].
// Throws ParseError (with line number) on malformed or out-of-range rows.
std::vector<Point> read_points_csv(std::istream& in);
std::vector<Point> read_points_csv_file(const std::string& path);
void write_points_csv(std::ostream& out, const std::vector<Point>& pts);
std::string points_csv_string(const std::vector<Point>& pts);

}  // namespace facloc
