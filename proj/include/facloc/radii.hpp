#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "facloc/geometry.hpp"

namespace facloc {

// Per-point radii r_p: the unique r > 0 at which the summed slack
//   sum over q with dist(p,q) <= r of (r - dist(p,q))
// reaches 1, the sum running over the whole set including p itself.
// Consequences used throughout: 0 < r_p <= 1, and the sum at radius r_p
// counts at least 1/r_p points.
struct RadiusProfile {
  std::vector<double> radii;  // index-aligned with the PointSet
  double sum_r = 0.0;
  double sum_r_sq = 0.0;

  double min_r() const;
  double max_r() const;
};

// Exact piecewise-linear solve: distances are collected through the cell
// index over a growing scan radius; a candidate root is final once it does
// not exceed the scanned radius.
double radius_of(const PointSet& X, std::size_t i);

// Bisection on the continuous nondecreasing slack map over [0,1] using a
// plain linear scan. Slow; kept as an independent cross-check for
// radius_of, not used on any production path.
double radius_bisect_oracle(const PointSet& X, std::size_t i, double tol);

RadiusProfile all_radii(const PointSet& X);         // OpenMP over points
RadiusProfile all_radii_serial(const PointSet& X);  // reference loop

// Extends X with p, recomputing only p's radius and the radii of points q
// with dist(q,p) < r_q. Any other q gains no slack term at its old root,
// so its radius is unchanged.
std::pair<PointSet, RadiusProfile> radius_after_insert(
    const PointSet& X, const RadiusProfile& profile, Point p);

}  // namespace facloc
