#include "facloc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>

namespace facloc {

namespace {

constexpr double kAtPointEps = 1e-12;

// The median iteration runs in extended precision: with plain doubles the
// fixed point of the reweighted map can sit with a residual gradient of
// ~1e-9, too coarse to certify a 1e-9 duality gap. Blocks are tiny (the
// exact solver caps at 20 points), so the extra cost is irrelevant.
struct LPoint {
  long double x;
  long double y;
};

long double ldist(const Point& p, const LPoint& q) {
  const long double dx = static_cast<long double>(p.x) - q.x;
  const long double dy = static_cast<long double>(p.y) - q.y;
  return sqrtl(dx * dx + dy * dy);
}

// Net pull on y from points not located at y, and the count located at y.
// y is a minimizer of the summed distance iff |pull| <= multiplicity.
std::pair<LPoint, std::size_t> subgradient_parts(
    const std::vector<Point>& pts, LPoint y) {
  LPoint pull{0.0L, 0.0L};
  std::size_t mult = 0;
  for (const Point& p : pts) {
    const long double d = ldist(p, y);
    if (d <= kAtPointEps) {
      ++mult;
    } else {
      pull.x += (static_cast<long double>(p.x) - y.x) / d;
      pull.y += (static_cast<long double>(p.y) - y.y) / d;
    }
  }
  return {pull, mult};
}

long double summed_distance_l(const std::vector<Point>& pts, LPoint y) {
  long double s = 0.0L;
  for (const Point& p : pts) s += ldist(p, y);
  return s;
}

// Subgradient excess |pull| - multiplicity, the quantity the stopping
// certificate bounds; coincides with the gradient norm away from inputs.
long double gradient_excess_l(const std::vector<Point>& pts, LPoint y) {
  const auto [pull, mult] = subgradient_parts(pts, y);
  const long double ex =
      hypotl(pull.x, pull.y) - static_cast<long double>(mult);
  return ex > 0.0L ? ex : 0.0L;
}

double summed_distance(const std::vector<Point>& pts, Point y) {
  double s = 0.0;
  for (const Point& p : pts) s += dist(p, y);
  return s;
}

}  // namespace

Point weiszfeld(const std::vector<Point>& points, double tol,
                std::size_t max_iter) {
  if (points.empty()) {
    throw std::invalid_argument("weiszfeld: empty point set");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("weiszfeld: tol must be positive");
  }
  const std::size_t n = points.size();
  if (n == 1) return points[0];
  if (n == 2) {
    // Any point of the segment is optimal; the midpoint is the
    // deterministic representative.
    return {0.5 * (points[0].x + points[1].x),
            0.5 * (points[0].y + points[1].y)};
  }

  double xlo = points[0].x, xhi = points[0].x;
  double ylo = points[0].y, yhi = points[0].y;
  for (const Point& p : points) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  // Iterates and the optimum stay in the convex hull, so the duality gap
  // f(x) - f* is at most |grad| * hull diameter; at an input point the
  // subgradient excess |pull| - mult plays the role of the gradient norm.
  const long double diam = std::hypot(xhi - xlo, yhi - ylo) + 1e-6;
  const long double ltol = tol;

  // An input point can be the minimizer (obtuse configurations), where the
  // plain iteration converges sublinearly; catch that before iterating.
  if (n <= 64) {
    for (const Point& cand : points) {
      const auto [pull, mult] =
          subgradient_parts(points, {cand.x, cand.y});
      const long double excess =
          hypotl(pull.x, pull.y) - static_cast<long double>(mult);
      if (excess * diam <= ltol) return cand;
    }
  }

  LPoint x{0.0L, 0.0L};
  for (const Point& p : points) {
    x.x += p.x;
    x.y += p.y;
  }
  x.x /= static_cast<long double>(n);
  x.y /= static_cast<long double>(n);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    long double wsum = 0.0L, txs = 0.0L, tys = 0.0L, gx = 0.0L, gy = 0.0L;
    long double hxx = 0.0L, hxy = 0.0L, hyy = 0.0L;
    bool at_point = false;
    for (const Point& p : points) {
      const long double d = ldist(p, x);
      if (d <= kAtPointEps) {
        at_point = true;
        break;
      }
      const long double w = 1.0L / d;
      wsum += w;
      txs += p.x * w;
      tys += p.y * w;
      const long double ux = (x.x - p.x) * w;
      const long double uy = (x.y - p.y) * w;
      gx += ux;
      gy += uy;
      hxx += (1.0L - ux * ux) * w;
      hxy -= ux * uy * w;
      hyy += (1.0L - uy * uy) * w;
    }
    if (at_point) {
      const auto [pull, mult] = subgradient_parts(points, x);
      const long double pn = hypotl(pull.x, pull.y);
      if ((pn - static_cast<long double>(mult)) * diam <= ltol) {
        return {static_cast<double>(x.x), static_cast<double>(x.y)};
      }
      x.x += 1e-9L * pull.x / pn;
      x.y += 1e-9L * pull.y / pn;
      continue;
    }
    if (hypotl(gx, gy) * diam <= ltol) {
      return {static_cast<double>(x.x), static_cast<double>(x.y)};
    }

    const LPoint wz{txs / wsum, tys / wsum};
    LPoint next = wz;
    // A backtracked Newton step cuts through the flat valleys of
    // near-collinear configurations where the reweighted average crawls.
    // Once the distance sum saturates at working precision the candidates
    // are ranked by gradient excess, which stays informative.
    const long double det = hxx * hyy - hxy * hxy;
    if (det > 0.0L && hxx > 0.0L) {
      long double sx = (hyy * gx - hxy * gy) / det;
      long double sy = (hxx * gy - hxy * gx) / det;
      const long double fx = summed_distance_l(points, x);
      for (int halvings = 0; halvings < 80; ++halvings) {
        const LPoint cand{x.x - sx, x.y - sy};
        if (cand.x == x.x && cand.y == x.y) break;  // step vanished
        const long double fc = summed_distance_l(points, cand);
        if (fc <= fx) {
          const long double fw = summed_distance_l(points, wz);
          if (fc < fw || (fc == fw && gradient_excess_l(points, cand) <
                                          gradient_excess_l(points, wz))) {
            next = cand;
          }
          break;
        }
        sx *= 0.5L;
        sy *= 0.5L;
      }
    }
    if (next.x == x.x && next.y == x.y) break;  // fixed point, no progress
    x = next;
  }
  throw WeiszfeldError("weiszfeld: no convergence",
                       {static_cast<double>(x.x), static_cast<double>(x.y)});
}

FacilitySolution assemble_solution(const PointSet& X,
                                   std::vector<Point> facilities) {
  FacilitySolution sol;
  sol.facilities = std::move(facilities);
  const std::size_t nf = sol.facilities.size();
  sol.open_cost = static_cast<double>(nf);
  if (X.empty()) {
    sol.total_cost = sol.open_cost;
    return sol;
  }
  if (nf == 0) {
    throw std::invalid_argument("assemble_solution: no facilities");
  }
  const std::size_t n = X.size();
  sol.assignment.resize(n);
  std::vector<double> dists(n);
  if (nf <= 32) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t f = 0; f < nf; ++f) {
        const double d = dist(X[i], sol.facilities[f]);
        if (d < best) {
          best = d;
          arg = static_cast<std::uint32_t>(f);
        }
      }
      sol.assignment[i] = arg;
      dists[i] = best;
    }
  } else {
    const double cell = 1.0 / std::ceil(std::sqrt(static_cast<double>(nf)));
    const PointSet fs(sol.facilities, cell);
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) {
      const std::size_t f = fs.nearest(X[static_cast<std::size_t>(i)]);
      sol.assignment[i] = static_cast<std::uint32_t>(f);
      dists[i] = dist(X[static_cast<std::size_t>(i)], sol.facilities[f]);
    }
  }
  double conn = 0.0;
  for (std::size_t i = 0; i < n; ++i) conn += dists[i];  // index order
  sol.connection_cost = conn;
  sol.total_cost = sol.open_cost + conn;
  return sol;
}

namespace {

std::vector<Point> mask_points(const PointSet& X, std::uint32_t mask) {
  std::vector<Point> out;
  for (std::uint32_t m = mask; m != 0; m &= m - 1) {
    out.push_back(X[static_cast<std::size_t>(std::countr_zero(m))]);
  }
  return out;
}

bool lex_list_less(const std::vector<Point>& a, const std::vector<Point>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      lex_less);
}

}  // namespace

FacilitySolution exact_cost(const PointSet& X, std::size_t exact_limit) {
  const std::size_t n = X.size();
  if (n == 0) throw std::invalid_argument("exact_cost: empty point set");
  if (n > exact_limit) {
    throw std::invalid_argument("exact_cost: size above exact_limit");
  }
  if (n > 20) {
    throw std::invalid_argument("exact_cost: more than 20 points");
  }

  // Price every nonempty subset at its geometric median once; partitions
  // are then sums of table entries.
  const std::uint32_t full = 1u << n;
  std::vector<double> med_cost(full, 0.0);
  std::vector<Point> med_pt(full);
  const std::int64_t full_i = static_cast<std::int64_t>(full);
  std::exception_ptr med_error;  // exceptions must not escape the omp region
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t mask = 1; mask < full_i; ++mask) {
    try {
      const std::vector<Point> blk =
          mask_points(X, static_cast<std::uint32_t>(mask));
      const Point m = weiszfeld(blk, 1e-9, 200000);
      med_pt[mask] = m;
      med_cost[mask] = summed_distance(blk, m);
    } catch (...) {
#pragma omp critical(facloc_exact_error)
      {
        if (!med_error) med_error = std::current_exception();
      }
    }
  }
  if (med_error) std::rethrow_exception(med_error);

  std::vector<int> a(n, 0), pm(n, 0);  // growth string, running prefix max
  std::vector<std::uint32_t> blocks(n, 0);
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  std::vector<std::uint32_t> best_blocks;
  std::vector<Point> best_fac;

  auto facilities_of = [&](const std::vector<std::uint32_t>& blks,
                           std::size_t k) {
    std::vector<Point> fac(k);
    for (std::size_t b = 0; b < k; ++b) fac[b] = med_pt[blks[b]];
    std::sort(fac.begin(), fac.end(), lex_less);
    return fac;
  };

  for (;;) {
    const std::size_t k = static_cast<std::size_t>(pm[n - 1]) + 1;
    std::fill(blocks.begin(), blocks.begin() + k, 0u);
    for (std::size_t i = 0; i < n; ++i) blocks[a[i]] |= 1u << i;
    double cost = static_cast<double>(k);
    for (std::size_t b = 0; b < k; ++b) cost += med_cost[blocks[b]];

    bool take = cost < best_cost;
    if (!take && cost == best_cost) {
      if (k < best_k) {
        take = true;
      } else if (k == best_k) {
        take = lex_list_less(facilities_of(blocks, k), best_fac);
      }
    }
    if (take) {
      best_cost = cost;
      best_k = k;
      best_blocks.assign(blocks.begin(), blocks.begin() + k);
      best_fac = facilities_of(best_blocks, k);
    }

    std::size_t i = n - 1;
    while (i > 0 && a[i] > pm[i - 1]) --i;
    if (i == 0) break;
    ++a[i];
    pm[i] = std::max(pm[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      pm[j] = pm[j - 1];
    }
  }
  return assemble_solution(X, std::move(best_fac));
}

namespace {

struct SubsetCandidate {
  double cost = std::numeric_limits<double>::infinity();
  std::uint32_t mask = 0;
};

// Strict total order: cost, then fewer facilities, then lexicographic
// facility list, then mask. Totality makes the parallel reduction
// independent of thread count.
bool subset_better(const PointSet& X, const SubsetCandidate& a,
                   const SubsetCandidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  const int pa = std::popcount(a.mask), pb = std::popcount(b.mask);
  if (pa != pb) return pa < pb;
  const auto la = mask_points(X, a.mask), lb = mask_points(X, b.mask);
  if (lex_list_less(la, lb)) return true;
  if (lex_list_less(lb, la)) return false;
  return a.mask < b.mask;
}

FacilitySolution restricted_core(const PointSet& X, std::size_t limit,
                                 bool parallel) {
  const std::size_t n = X.size();
  if (n == 0) throw std::invalid_argument("restricted_exact: empty point set");
  if (n > limit) {
    throw std::invalid_argument("restricted_exact: size above restricted_limit");
  }
  if (n > 20) {
    throw std::invalid_argument("restricted_exact: more than 20 points");
  }
  std::vector<double> D(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) D[i * n + j] = dist(X[i], X[j]);
  }
  auto subset_cost = [&](std::uint32_t mask) {
    double cost = std::popcount(mask);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t m = mask; m != 0; m &= m - 1) {
        const double d = D[i * n + std::countr_zero(m)];
        if (d < best) best = d;
      }
      cost += best;
    }
    return cost;
  };

  const std::int64_t full = static_cast<std::int64_t>(1u << n);
  SubsetCandidate best;
  if (parallel) {
#pragma omp parallel
    {
      SubsetCandidate local;
#pragma omp for schedule(static) nowait
      for (std::int64_t mask = 1; mask < full; ++mask) {
        const SubsetCandidate cand{subset_cost(static_cast<std::uint32_t>(mask)),
                                   static_cast<std::uint32_t>(mask)};
        if (subset_better(X, cand, local)) local = cand;
      }
#pragma omp critical(facloc_restricted_merge)
      {
        if (subset_better(X, local, best)) best = local;
      }
    }
  } else {
    for (std::int64_t mask = 1; mask < full; ++mask) {
      const SubsetCandidate cand{subset_cost(static_cast<std::uint32_t>(mask)),
                                 static_cast<std::uint32_t>(mask)};
      if (subset_better(X, cand, best)) best = cand;
    }
  }
  return assemble_solution(X, mask_points(X, best.mask));
}

}  // namespace

FacilitySolution restricted_exact(const PointSet& X, std::size_t limit) {
  return restricted_core(X, limit, true);
}

FacilitySolution restricted_exact_serial(const PointSet& X,
                                         std::size_t limit) {
  return restricted_core(X, limit, false);
}

namespace {

// Append-only uniform grid over opened facilities; mirrors the PointSet
// cell convention.
class OpenGrid {
 public:
  OpenGrid(int side, double cell)
      : side_(side), cell_(cell),
        cells_(static_cast<std::size_t>(side) * side) {}

  void insert(Point p) { cells_[index_of(p)].push_back(p); }

  bool any_within(Point c, double t) const {
    if (t < 0.0) return false;
    const int xlo = coord(c.x - t), xhi = coord(c.x + t);
    const int ylo = coord(c.y - t), yhi = coord(c.y + t);
    for (int cy = ylo; cy <= yhi; ++cy) {
      for (int cx = xlo; cx <= xhi; ++cx) {
        const auto& cell =
            cells_[static_cast<std::size_t>(cy) * side_ + cx];
        for (const Point& p : cell) {
          if (dist(p, c) <= t) return true;
        }
      }
    }
    return false;
  }

 private:
  int coord(double v) const {
    int c = static_cast<int>(v / cell_);
    if (c < 0) c = 0;
    if (c >= side_) c = side_ - 1;
    return c;
  }
  std::size_t index_of(Point p) const {
    return static_cast<std::size_t>(coord(p.y)) * side_ + coord(p.x);
  }

  int side_;
  double cell_;
  std::vector<std::vector<Point>> cells_;
};

}  // namespace

std::vector<std::size_t> mp_greedy_sites(const PointSet& X,
                                         const RadiusProfile& profile,
                                         double gamma) {
  if (profile.radii.size() != X.size()) {
    throw std::invalid_argument("mp_greedy: profile/set mismatch");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("mp_greedy: gamma must be positive");
  }
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (profile.radii[a] != profile.radii[b]) {
      return profile.radii[a] < profile.radii[b];
    }
    return a < b;
  });
  OpenGrid open(X.side(), X.cell_size());
  std::vector<std::size_t> sites;
  for (const std::size_t i : order) {
    if (!open.any_within(X[i], gamma * profile.radii[i])) {
      open.insert(X[i]);
      sites.push_back(i);
    }
  }
  return sites;
}

FacilitySolution mp_greedy(const PointSet& X, const RadiusProfile& profile,
                           double gamma) {
  const std::vector<std::size_t> sites = mp_greedy_sites(X, profile, gamma);
  std::vector<Point> fac;
  fac.reserve(sites.size());
  for (const std::size_t i : sites) fac.push_back(X[i]);
  return assemble_solution(X, std::move(fac));
}

std::size_t default_grid_k(std::size_t n) {
  const auto k = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(n), 2.0 / 3.0)));
  return k < 1 ? 1 : k;
}

namespace {

// Index of the nearest of m evenly spaced centers (i+0.5)/m along one
// axis, lower index on ties.
std::size_t axis_nearest(double v, std::size_t m) {
  auto center = [m](std::size_t i) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  };
  std::int64_t i0 = static_cast<std::int64_t>(v * static_cast<double>(m));
  if (i0 < 0) i0 = 0;
  if (i0 >= static_cast<std::int64_t>(m)) i0 = static_cast<std::int64_t>(m) - 1;
  std::size_t best = (i0 > 0) ? static_cast<std::size_t>(i0 - 1)
                              : static_cast<std::size_t>(i0);
  double best_d = std::abs(v - center(best));
  for (std::size_t i = best + 1;
       i < m && i <= static_cast<std::size_t>(i0) + 1; ++i) {
    const double d = std::abs(v - center(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

FacilitySolution grid_cost(const PointSet& X, std::size_t k) {
  if (k == 0) throw std::invalid_argument("grid_cost: k must be >= 1");
  FacilitySolution sol;
  sol.facilities = grid_points(k);
  std::size_t m = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(k))));
  while (m * m < k) ++m;
  sol.open_cost = static_cast<double>(sol.facilities.size());
  sol.assignment.resize(X.size());
  double conn = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Point p = X[i];
    const std::size_t fi = axis_nearest(p.y, m) * m + axis_nearest(p.x, m);
    sol.assignment[i] = static_cast<std::uint32_t>(fi);
    conn += dist(p, sol.facilities[fi]);
  }
  sol.connection_cost = conn;
  sol.total_cost = sol.open_cost + conn;
  return sol;
}

}  // namespace facloc
