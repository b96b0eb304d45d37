#include "facloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "facloc/rng.hpp"

namespace facloc {

double dist(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double default_cell_size(std::size_t n) {
  const double m = std::ceil(std::cbrt(static_cast<double>(n < 1 ? 1 : n)));
  return 1.0 / m;
}

PointSet::PointSet(std::vector<Point> points, double cell_size)
    : pts_(std::move(points)), cell_size_(cell_size) {
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw std::invalid_argument("PointSet: cell_size must be positive");
  }
  build();
}

PointSet::PointSet(std::vector<Point> points)
    : pts_(std::move(points)), cell_size_(default_cell_size(pts_.size())) {
  build();
}

void PointSet::build() {
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const Point p = pts_[i];
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw std::invalid_argument("PointSet: point " + std::to_string(i) +
                                  " outside the unit square");
    }
  }
  side_ = static_cast<int>(std::floor(1.0 / cell_size_)) + 1;
  const std::size_t ncells =
      static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
  if (ncells > (1u << 24)) {
    throw std::invalid_argument("PointSet: cell_size too small");
  }
  cell_start_.assign(ncells + 1, 0);
  cell_items_.resize(pts_.size());
  for (const Point& p : pts_) {
    const std::size_t c = static_cast<std::size_t>(cell_coord(p.y)) * side_ +
                          static_cast<std::size_t>(cell_coord(p.x));
    ++cell_start_[c + 1];
  }
  for (std::size_t c = 1; c <= ncells; ++c) cell_start_[c] += cell_start_[c - 1];
  std::vector<std::uint32_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    const Point p = pts_[i];
    const std::size_t c = static_cast<std::size_t>(cell_coord(p.y)) * side_ +
                          static_cast<std::size_t>(cell_coord(p.x));
    cell_items_[cursor[c]++] = static_cast<std::uint32_t>(i);
  }
}

int PointSet::cell_coord(double v) const {
  int c = static_cast<int>(v / cell_size_);
  if (c < 0) c = 0;
  if (c >= side_) c = side_ - 1;
  return c;
}

std::size_t PointSet::occupied_cells() const {
  std::size_t occ = 0;
  for (std::size_t c = 0; c + 1 < cell_start_.size(); ++c) {
    occ += cell_start_[c + 1] > cell_start_[c];
  }
  return occ;
}

std::vector<std::size_t> PointSet::ball(Point center, double r) const {
  std::vector<std::size_t> out;
  if (empty() || r < 0.0) return out;
  const int xlo = cell_coord(center.x - r), xhi = cell_coord(center.x + r);
  const int ylo = cell_coord(center.y - r), yhi = cell_coord(center.y + r);
  for (int cy = ylo; cy <= yhi; ++cy) {
    for (int cx = xlo; cx <= xhi; ++cx) {
      const std::size_t c =
          static_cast<std::size_t>(cy) * side_ + static_cast<std::size_t>(cx);
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const std::size_t i = cell_items_[k];
        if (dist(pts_[i], center) <= r) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PointSet::distances_within(Point center, double r,
                                std::vector<double>& out) const {
  if (empty() || r < 0.0) return;
  const int xlo = cell_coord(center.x - r), xhi = cell_coord(center.x + r);
  const int ylo = cell_coord(center.y - r), yhi = cell_coord(center.y + r);
  for (int cy = ylo; cy <= yhi; ++cy) {
    for (int cx = xlo; cx <= xhi; ++cx) {
      const std::size_t c =
          static_cast<std::size_t>(cy) * side_ + static_cast<std::size_t>(cx);
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const double d = dist(pts_[cell_items_[k]], center);
        if (d <= r) out.push_back(d);
      }
    }
  }
}

std::size_t PointSet::nearest(Point center) const {
  if (empty()) throw std::invalid_argument("PointSet::nearest: empty set");
  const int cx = cell_coord(center.x);
  const int cy = cell_coord(center.y);
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_i = SIZE_MAX;
  auto scan_cell = [&](int gx, int gy) {
    if (gx < 0 || gx >= side_ || gy < 0 || gy >= side_) return;
    const std::size_t c =
        static_cast<std::size_t>(gy) * side_ + static_cast<std::size_t>(gx);
    for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
      const std::size_t i = cell_items_[k];
      const double d = dist(pts_[i], center);
      if (d < best_d || (d == best_d && i < best_i)) {
        best_d = d;
        best_i = i;
      }
    }
  };
  for (int ring = 0;; ++ring) {
    // A cell in ring L is at least (L-1) full cells away from the center's
    // cell, so once (L-1)*s exceeds the best distance no ring can improve.
    if (ring > 0 && (ring - 1) * cell_size_ > best_d) break;
    if (ring == 0) {
      scan_cell(cx, cy);
      continue;
    }
    for (int gx = cx - ring; gx <= cx + ring; ++gx) {
      scan_cell(gx, cy - ring);
      scan_cell(gx, cy + ring);
    }
    for (int gy = cy - ring + 1; gy <= cy + ring - 1; ++gy) {
      scan_cell(cx - ring, gy);
      scan_cell(cx + ring, gy);
    }
  }
  return best_i;
}

PointSet PointSet::with_appended(Point p) const {
  std::vector<Point> pts = pts_;
  pts.push_back(p);
  return PointSet(std::move(pts), cell_size_);
}

PointSet uniform_sample(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("uniform_sample: n must be >= 1");
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i].x = uniform01(seed, 2 * i);
    pts[i].y = uniform01(seed, 2 * i + 1);
  }
  return PointSet(std::move(pts), default_cell_size(n));
}

PointSet build_index(std::vector<Point> points, double cell_size) {
  return PointSet(std::move(points), cell_size);
}

std::vector<std::size_t> ball_query(const PointSet& X, Point center, double r) {
  return X.ball(center, r);
}

std::vector<Point> grid_points(std::size_t k) {
  if (k == 0) throw std::invalid_argument("grid_points: k must be >= 1");
  std::size_t m = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(k))));
  while (m * m < k) ++m;
  std::vector<Point> out;
  out.reserve(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      out.push_back({(i + 0.5) / m, (j + 0.5) / m});
    }
  }
  return out;
}

}  // namespace facloc
