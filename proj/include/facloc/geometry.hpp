#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace facloc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(Point a, Point b) { return !(a == b); }

double dist(Point a, Point b);

// Lexicographic (x, then y); used for deterministic tie-breaking.
inline bool lex_less(Point a, Point b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Immutable collection of points in the unit square with a uniform-cell
// spatial index. Cells are half-open: cell k covers [k*s, (k+1)*s).
// Safe for concurrent read-only access once built.
class PointSet {
 public:
  PointSet() = default;
  // Throws std::invalid_argument on nonpositive cell_size, out-of-square
  // coordinates, or a cell_size so small the dense grid would blow up.
  PointSet(std::vector<Point> points, double cell_size);
  explicit PointSet(std::vector<Point> points);

  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  const Point& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Point>& points() const { return pts_; }
  double cell_size() const { return cell_size_; }
  int side() const { return side_; }
  std::size_t occupied_cells() const;

  // Indices of all points with dist(point, center) <= r, ascending.
  std::vector<std::size_t> ball(Point center, double r) const;
  // Distances (not indices) of all points within r of center, appended
  // unsorted. Allocation-free when `out` has capacity.
  void distances_within(Point center, double r,
                        std::vector<double>& out) const;
  // Index of the closest point to center, lowest index on exact ties.
  std::size_t nearest(Point center) const;

  PointSet with_appended(Point p) const;

 private:
  int cell_coord(double v) const;
  void build();

  std::vector<Point> pts_;
  double cell_size_ = 1.0;
  int side_ = 1;
  std::vector<std::uint32_t> cell_start_;  // side_*side_ + 1 offsets
  std::vector<std::uint32_t> cell_items_;  // point indices grouped by cell
};

// Cell side matched to the typical nearest-neighbour scale of n uniform
// points, 1/ceil(n^(1/3)).
double default_cell_size(std::size_t n);

PointSet uniform_sample(std::size_t n, std::uint64_t seed);
PointSet build_index(std::vector<Point> points, double cell_size);
std::vector<std::size_t> ball_query(const PointSet& X, Point center, double r);

// ceil(sqrt(k))^2 cell centers of a uniform grid over the unit square,
// x varying fastest.
std::vector<Point> grid_points(std::size_t k);

}  // namespace facloc
