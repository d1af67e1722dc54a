// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "shrinktm/geometry.hpp"

using namespace shrinktm;

namespace {

double dist(const Locations& locs, std::size_t a, std::size_t b) {
  return (locs.coords.row(static_cast<Eigen::Index>(a)) - locs.coords.row(static_cast<Eigen::Index>(b))).norm();
}

// Least-squares slope of log scale against log (1-based) position over [lo, hi].
double decay_slope(const Ordering& ord, std::size_t lo, std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double x = std::log(static_cast<double>(i)), y = std::log(ord.scales[i - 1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void check_invariants(const Locations& locs, const Ordering& ord) {
  const std::size_t n = locs.size();
  REQUIRE(ord.perm.size() == n);
  std::set<std::size_t> seen(ord.perm.begin(), ord.perm.end());
  CHECK(seen.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(ord.rank[ord.perm[i]] == i);
  for (std::size_t i = 1; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < i; ++j) best = std::min(best, dist(locs, ord.perm[i], ord.perm[j]));
    CHECK(ord.scales[i] == doctest::Approx(best).epsilon(1e-12));
    if (i >= 2) CHECK(ord.scales[i] <= ord.scales[i - 1] * (1 + 1e-12));
    const auto& nb = ord.neighbors[i];
    CHECK(nb.size() == std::min<std::size_t>(i, static_cast<std::size_t>(ord.max_neighbors)));
    CHECK(dist(locs, ord.perm[i], ord.perm[static_cast<std::size_t>(nb[0])]) == doctest::Approx(ord.scales[i]));
    for (std::size_t k = 0; k < nb.size(); ++k) {
      CHECK(nb[k] < static_cast<int>(i));
      if (k == 0) continue;
      const double a = dist(locs, ord.perm[i], ord.perm[static_cast<std::size_t>(nb[k - 1])]);
      const double b = dist(locs, ord.perm[i], ord.perm[static_cast<std::size_t>(nb[k])]);
      CHECK((a < b || (a == b && nb[k - 1] < nb[k])));
    }
  }
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("four corners starting at the origin") {
    Matrix c(4, 2);
    c << 0, 0, 1, 0, 0, 1, 1, 1;
    const auto locs = Locations::from_coords(c);
    const Ordering ord = maximin_order(locs, std::size_t{0});
    CHECK(ord.perm[0] == 0);
    CHECK(ord.perm[1] == 3);
    CHECK(ord.scales[1] == doctest::Approx(std::sqrt(2.0)));
    // remaining corners tie at distance 1, lowest original index first
    CHECK(ord.perm[2] == 1);
    CHECK(ord.perm[3] == 2);
  }

  TEST_CASE("single location") {
    Matrix c(1, 2);
    c << 0.3, 0.7;
    const Ordering ord = maximin_order(Locations::from_coords(c));
    CHECK(ord.perm == std::vector<std::size_t>{0});
    REQUIRE(ord.scales.size() == 1);
    CHECK(ord.scales[0] == 1.0);
    CHECK(ord.neighbors[0].empty());
  }

  TEST_CASE("first scale is the diameter") {
    const auto locs = Locations::grid(5, 4);
    const Ordering ord = maximin_order(locs);
    CHECK(ord.scales[0] == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("default first point is nearest the centroid") {
    Matrix c(5, 2);
    c << 0, 0, 1, 0, 0, 1, 1, 1, 0.45, 0.55;
    CHECK(maximin_order(Locations::from_coords(c)).perm[0] == 4);
  }

  TEST_CASE("scale decay on the 30x30 grid") {
    const Ordering ord = maximin_order(Locations::grid(30, 30));
    CHECK(decay_slope(ord, 10, 900) == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(decay_slope(ord, 10, 900) + 0.5) <= 0.1);
  }

  TEST_CASE("scale decay in one and three dimensions") {
    CHECK(std::abs(decay_slope(maximin_order(Locations::line(400)), 10, 400) + 1.0) <= 0.15);
    Matrix cube(1000, 3);
    for (int r = 0; r < 1000; ++r) cube.row(r) << r % 10 / 9.0, r / 10 % 10 / 9.0, r / 100 / 9.0;
    const Ordering ord3 = maximin_order(Locations::from_coords(cube));
    CHECK(std::abs(decay_slope(ord3, 10, 1000) + 1.0 / 3.0) <= 0.1);
  }

  TEST_CASE("ordering invariants on random points") {
    for (int dim = 1; dim <= 3; ++dim)
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto locs = testing::random_locations(120, dim, seed * 10 + static_cast<std::uint64_t>(dim));
        check_invariants(locs, maximin_order(locs));
      }
  }

  TEST_CASE("swapping the first point keeps the scale decay") {
    const auto locs = Locations::grid(8, 8);
    const Ordering a = maximin_order(locs, std::size_t{0});
    const Ordering b = maximin_order(locs, std::size_t{27});
    CHECK(a.perm != b.perm);
    check_invariants(locs, a);
    check_invariants(locs, b);
  }

  TEST_CASE("neighbor_sets") {
    const Ordering ord = maximin_order(Locations::grid(6, 6));
    const auto g = neighbor_sets(ord, 30);
    CHECK(g[0].empty());
    REQUIRE(g[2].size() == 2);
    CHECK(g[2][0] == ord.neighbors[2][0]);
    CHECK(g[2][1] == ord.neighbors[2][1]);
    const auto g4 = neighbor_sets(ord, 4);
    for (std::size_t i = 0; i < ord.size(); ++i) {
      CHECK(g4[i].size() == std::min<std::size_t>(i, 4));
      for (std::size_t k = 0; k < g4[i].size(); ++k) CHECK(g4[i][k] == ord.neighbors[i][k]);
    }
    CHECK_THROWS_AS(neighbor_sets(ord, 31), std::invalid_argument);
    CHECK_THROWS_AS(neighbor_sets(ord, 0), std::invalid_argument);
  }

  TEST_CASE("nearest earlier neighbor on a line matches a brute-force scan") {
    const auto locs = Locations::line(60);
    const Ordering ord = maximin_order(locs);
    for (std::size_t i = 1; i < ord.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < i; ++j)
        if (dist(locs, ord.perm[i], ord.perm[j]) < dist(locs, ord.perm[i], ord.perm[best])) best = j;
      CHECK(ord.neighbors[i][0] == static_cast<int>(best));
    }
  }

  TEST_CASE("duplicate points are rejected") {
    Matrix c(3, 2);
    c << 0, 0, 1, 1, 0, 0;
    CHECK_THROWS_WITH_AS(maximin_order(Locations::from_coords(c)), "degenerate locations", DataError);
  }

  TEST_CASE("first index out of range") {
    CHECK_THROWS(maximin_order(Locations::grid(2, 2), std::size_t{4}));
  }

  TEST_CASE("deterministic and permutation helpers round-trip") {
    const auto locs = testing::random_locations(50, 2, 9);
    const Ordering a = maximin_order(locs), b = maximin_order(locs);
    CHECK(a.perm == b.perm);
    CHECK(a.neighbors == b.neighbors);
    const Matrix y = testing::random_matrix(3, 50, 1);
    CHECK(to_file_order(to_maximin(y, a), a) == y);
    const Locations ol = ordered_locations(locs, a);
    for (std::size_t i = 0; i < 50; ++i)
      CHECK(ol.coords.row(static_cast<Eigen::Index>(i)) == locs.coords.row(static_cast<Eigen::Index>(a.perm[i])));
  }

  TEST_CASE("custom distance hook") {
    // L1 distance on a grid: the ordering still satisfies its own min-distance invariant
    const auto locs = Locations::grid(5, 5);
    DistanceFn l1 = [](const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
      return (a - b).cwiseAbs().sum();
    };
    const Ordering ord = maximin_order(locs, std::nullopt, 30, l1);
    for (std::size_t i = 1; i < ord.size(); ++i) {
      double best = 1e300;
      for (std::size_t j = 0; j < i; ++j)
        best = std::min(best, l1(locs.coords.row(static_cast<Eigen::Index>(ord.perm[i])),
                                 locs.coords.row(static_cast<Eigen::Index>(ord.perm[j]))));
      CHECK(ord.scales[i] == doctest::Approx(best));
    }
  }
}
