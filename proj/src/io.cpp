#include "facloc/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace facloc {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_coord(const std::string& field, std::size_t line_no) {
  const std::string f = strip(field);
  double v = 0.0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    throw ParseError(line_no, "malformed coordinate '" + field + "'");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ParseError(line_no, "coordinate " + f + " outside [0,1]");
  }
  return v;
}

}  // namespace

std::vector<Point> read_points_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (strip(line) != "x,y") throw ParseError(1, "expected header 'x,y'");
  std::vector<Point> pts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = strip(line);
    if (row.empty()) continue;
    const std::size_t comma = row.find(',');
    if (comma == std::string::npos) {
      throw ParseError(line_no, "expected 'x,y' pair");
    }
    if (row.find(',', comma + 1) != std::string::npos) {
      throw ParseError(line_no, "too many fields");
    }
    Point p;
    p.x = parse_coord(row.substr(0, comma), line_no);
    p.y = parse_coord(row.substr(comma + 1), line_no);
    pts.push_back(p);
  }
  return pts;
}

std::vector<Point> read_points_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_points_csv(in);
}

void write_points_csv(std::ostream& out, const std::vector<Point>& pts) {
  out << "x,y\n";
  for (const Point& p : pts) {
    out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
}

std::string points_csv_string(const std::vector<Point>& pts) {
  std::ostringstream os;
  write_points_csv(os, pts);
  return os.str();
}

}  // namespace facloc
