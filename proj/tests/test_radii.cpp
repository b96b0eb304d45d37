#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "facloc/radii.hpp"
#include "facloc/rng.hpp"

using namespace facloc;

TEST_CASE("radius_of on pinned configurations") {
  const PointSet single({{0.5, 0.5}});
  CHECK(radius_of(single, 0) == 1.0);

  // two points 0.5 apart: 2r - 0.5 = 1
  const PointSet pair({{0.0, 0.0}, {0.5, 0.0}});
  CHECK(radius_of(pair, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(radius_of(pair, 1) == doctest::Approx(0.75).epsilon(1e-12));

  // collinear triple 0.3 apart: active segment is all three points
  const PointSet triple({{0.0, 0.0}, {0.3, 0.0}, {0.6, 0.0}});
  CHECK(radius_of(triple, 0) == doctest::Approx(19.0 / 30.0).epsilon(1e-12));
  CHECK(radius_of(triple, 1) == doctest::Approx(8.0 / 15.0).epsilon(1e-12));
  CHECK(radius_of(triple, 2) == doctest::Approx(19.0 / 30.0).epsilon(1e-12));

  CHECK_THROWS_AS(radius_of(single, 1), std::out_of_range);
}

TEST_CASE("bisection oracle agrees with the exact solve") {
  const PointSet single({{0.5, 0.5}});
  CHECK(radius_bisect_oracle(single, 0, 1e-10) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const PointSet pair({{0.0, 0.0}, {0.5, 0.0}});
  CHECK(radius_bisect_oracle(pair, 0, 1e-10) ==
        doctest::Approx(0.75).epsilon(1e-9));

  const PointSet triple({{0.0, 0.0}, {0.3, 0.0}, {0.6, 0.0}});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(radius_of(triple, i) -
                   radius_bisect_oracle(triple, i, 1e-10)) < 1e-8);
  }

  const PointSet X = uniform_sample(500, 77);
  for (std::size_t i = 0; i < X.size(); ++i) {
    CHECK(std::abs(radius_of(X, i) - radius_bisect_oracle(X, i, 1e-10)) <
          1e-8);
  }

  CHECK_THROWS_AS(radius_bisect_oracle(single, 0, 0.0), std::invalid_argument);
}

TEST_CASE("all_radii aggregates and oracle sweep") {
  const PointSet coincident(std::vector<Point>(3, Point{0.2, 0.8}));
  const RadiusProfile prof = all_radii(coincident);
  for (const double r : prof.radii) {
    CHECK(r == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  CHECK(prof.sum_r == doctest::Approx(1.0).epsilon(1e-12));

  const RadiusProfile one = all_radii(PointSet({{0.1, 0.9}}));
  CHECK(one.radii == std::vector<double>{1.0});
  CHECK(one.sum_r == 1.0);
  CHECK(one.sum_r_sq == 1.0);

  const PointSet X = uniform_sample(1000, 1);
  const RadiusProfile big = all_radii(X);
  for (std::size_t i = 0; i < X.size(); ++i) {
    CHECK(std::abs(big.radii[i] - radius_bisect_oracle(X, i, 1e-10)) < 1e-8);
    CHECK(big.radii[i] > 0.0);
    CHECK(big.radii[i] <= 1.0 + 1e-12);
  }

  CHECK_THROWS_AS(all_radii(PointSet()), std::invalid_argument);
}

TEST_CASE("parallel all_radii matches the serial reference bitwise") {
  const PointSet X = uniform_sample(3000, 12);
  const RadiusProfile a = all_radii(X);
  const RadiusProfile b = all_radii_serial(X);
  CHECK(a.radii == b.radii);
  CHECK(a.sum_r == b.sum_r);
  CHECK(a.sum_r_sq == b.sum_r_sq);
}

TEST_CASE("radius_after_insert pinned cases") {
  // empty -> one point
  const auto [one, prof1] = radius_after_insert(PointSet(), RadiusProfile{},
                                                Point{0.3, 0.3});
  CHECK(one.size() == 1);
  CHECK(prof1.radii == std::vector<double>{1.0});

  const PointSet base({{0.0, 0.0}});
  const auto [two, prof2] =
      radius_after_insert(base, all_radii(base), Point{0.5, 0.0});
  REQUIRE(two.size() == 2);
  CHECK(prof2.radii[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(prof2.radii[1] == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(radius_after_insert(base, RadiusProfile{}, Point{0.1, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("radius_after_insert equals a full recompute") {
  const PointSet full = uniform_sample(501, 21);
  std::vector<Point> head(full.points().begin(), full.points().end() - 1);
  const PointSet X(head);
  const RadiusProfile before = all_radii(X);
  const auto [Y, after] = radius_after_insert(X, before, full.points().back());
  const RadiusProfile fresh = all_radii(Y);
  REQUIRE(after.radii.size() == fresh.radii.size());
  for (std::size_t i = 0; i < fresh.radii.size(); ++i) {
    CHECK(std::abs(after.radii[i] - fresh.radii[i]) <= 1e-12);
  }
  CHECK(std::abs(after.sum_r - fresh.sum_r) <= 1e-12);
  CHECK(std::abs(after.sum_r_sq - fresh.sum_r_sq) <= 1e-12);
}

TEST_CASE("insert monotonicity and halving bound") {
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const std::uint64_t seed = derive_seed(31, 0, trial);
    const std::size_t n = 2 + stream_at(seed, 0) % 300;
    const PointSet full = uniform_sample(n + 1, stream_at(seed, 1));
    std::vector<Point> head(full.points().begin(), full.points().end() - 1);
    const PointSet X(head);
    const RadiusProfile before = all_radii(X);
    const auto [Y, after] =
        radius_after_insert(X, before, full.points().back());
    for (std::size_t q = 0; q < X.size(); ++q) {
      CHECK(after.radii[q] <= before.radii[q] + 1e-12);
      CHECK(after.radii[q] >= 0.5 * before.radii[q] - 1e-12);
    }
  }
}
