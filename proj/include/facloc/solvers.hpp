#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "facloc/geometry.hpp"
#include "facloc/radii.hpp"

namespace facloc {

// A facility configuration for the objective |F| + sum of distances of
// each point to its nearest facility. `assignment[i]` is the index into
// `facilities` of point i's nearest facility (lowest index on ties).
struct FacilitySolution {
  std::vector<Point> facilities;
  std::vector<std::uint32_t> assignment;
  double open_cost = 0.0;
  double connection_cost = 0.0;
  double total_cost = 0.0;
};

struct WeiszfeldError : std::runtime_error {
  WeiszfeldError(const std::string& what, Point best)
      : std::runtime_error(what), best_iterate(best) {}
  Point best_iterate;
};

// Geometric median by reweighted averaging. Returns a point whose summed
// distance is within `tol` of the optimum. Conventions: a single point is
// its own median; two points yield the midpoint. An iterate landing on an
// input point is kept if that point satisfies the subgradient optimality
// test, otherwise it is nudged 1e-9 along the descent direction. Throws
// WeiszfeldError carrying the best iterate after max_iter steps.
Point weiszfeld(const std::vector<Point>& points, double tol = 1e-9,
                std::size_t max_iter = 100000);

// Nearest-facility assignment and costs for a fixed facility list.
FacilitySolution assemble_solution(const PointSet& X,
                                   std::vector<Point> facilities);

// Optimum over facilities anywhere in the square: enumerate set partitions
// (restricted growth strings), price each block at its geometric median.
// Grouping by nearest facility never increases the cost of any facility
// set, so the best partition attains the continuous optimum.
FacilitySolution exact_cost(const PointSet& X, std::size_t exact_limit = 10);

// Optimum over facility sets drawn from the input points only (exhaustive
// over nonempty subsets).
FacilitySolution restricted_exact(const PointSet& X,
                                  std::size_t restricted_limit = 16);
FacilitySolution restricted_exact_serial(const PointSet& X,
                                         std::size_t restricted_limit = 16);

// Radius-ordered greedy: visit points by ascending radius (ties by index),
// open a facility at a point unless one is already open within
// gamma * r_point. Returns the opened point indices in opening order.
std::vector<std::size_t> mp_greedy_sites(const PointSet& X,
                                         const RadiusProfile& profile,
                                         double gamma);
FacilitySolution mp_greedy(const PointSet& X, const RadiusProfile& profile,
                           double gamma = 2.0);

// Uniform-grid heuristic: ceil(sqrt(k))^2 cell centers as facilities.
FacilitySolution grid_cost(const PointSet& X, std::size_t k);
std::size_t default_grid_k(std::size_t n);  // round(n^(2/3))

}  // namespace facloc
