#include "facloc/radii.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace facloc {

double RadiusProfile::min_r() const {
  return radii.empty() ? 0.0 : *std::min_element(radii.begin(), radii.end());
}

double RadiusProfile::max_r() const {
  return radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
}

namespace {

// Exact root of sum_{d_j <= r} (r - d_j) = 1 given every distance that can
// enter the sum. On the segment where the k smallest distances are active
// the sum is k*r - sum(d_1..d_k), so the candidate root is
// (1 + sum(d_1..d_k))/k; the first candidate not exceeding the next
// distance is the root.
double solve_radius(std::vector<double>& dists) {
  std::sort(dists.begin(), dists.end());
  double prefix = 0.0;
  const std::size_t m = dists.size();
  for (std::size_t k = 1; k <= m; ++k) {
    prefix += dists[k - 1];
    const double root = (1.0 + prefix) / static_cast<double>(k);
    if (k == m || root <= dists[k]) return root;
  }
  return 1.0;  // unreachable: the k == m candidate always returns
}

void finalize_aggregates(RadiusProfile& prof) {
  prof.sum_r = 0.0;
  prof.sum_r_sq = 0.0;
  for (const double r : prof.radii) {
    prof.sum_r += r;
    prof.sum_r_sq += r * r;
  }
}

}  // namespace

double radius_of(const PointSet& X, std::size_t i) {
  if (i >= X.size()) throw std::out_of_range("radius_of: invalid index");
  const Point p = X[i];
  thread_local std::vector<double> dists;
  double scan = std::min(X.cell_size(), 1.0);
  for (;;) {
    dists.clear();
    X.distances_within(p, scan, dists);
    const double root = solve_radius(dists);
    // Points beyond the scan radius cannot contribute at a root below it;
    // at scan = 1 every possible contributor is in view since the root
    // never exceeds 1 (p itself yields slack r).
    if (root <= scan || scan >= 1.0) return root;
    scan = std::min(scan * 2.0, 1.0);
  }
}

double radius_bisect_oracle(const PointSet& X, std::size_t i, double tol) {
  if (i >= X.size()) {
    throw std::out_of_range("radius_bisect_oracle: invalid index");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("radius_bisect_oracle: tol must be positive");
  }
  const Point p = X[i];
  const auto& pts = X.points();
  auto slack = [&](double r) {
    double s = 0.0;
    for (const Point& q : pts) {
      const double d = dist(p, q);
      if (d <= r) s += r - d;
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (slack(mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RadiusProfile all_radii(const PointSet& X) {
  if (X.empty()) throw std::invalid_argument("all_radii: empty point set");
  RadiusProfile prof;
  prof.radii.resize(X.size());
  const std::int64_t n = static_cast<std::int64_t>(X.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    prof.radii[i] = radius_of(X, static_cast<std::size_t>(i));
  }
  finalize_aggregates(prof);  // serial, index order: bit-stable
  return prof;
}

RadiusProfile all_radii_serial(const PointSet& X) {
  if (X.empty()) throw std::invalid_argument("all_radii: empty point set");
  RadiusProfile prof;
  prof.radii.resize(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    prof.radii[i] = radius_of(X, i);
  }
  finalize_aggregates(prof);
  return prof;
}

std::pair<PointSet, RadiusProfile> radius_after_insert(
    const PointSet& X, const RadiusProfile& profile, Point p) {
  if (profile.radii.size() != X.size()) {
    throw std::invalid_argument("radius_after_insert: profile/set mismatch");
  }
  PointSet Y = X.with_appended(p);
  RadiusProfile out;
  out.radii = profile.radii;
  out.radii.push_back(radius_of(Y, X.size()));
  if (!X.empty()) {
    const double reach = profile.max_r();
    for (const std::size_t q : X.ball(p, reach)) {
      // Equality contributes zero slack at the old root; strict only.
      if (dist(X[q], p) < profile.radii[q]) {
        out.radii[q] = radius_of(Y, q);
      }
    }
  }
  finalize_aggregates(out);
  return {std::move(Y), std::move(out)};
}

}  // namespace facloc
