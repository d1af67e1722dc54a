// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "helpers.hpp"
#include "shrinktm/simulate.hpp"

using namespace shrinktm;

namespace {

SimDesign grid_design(DesignKind kind, int nx, int ny) {
  SimDesign d;
  d.kind = kind;
  d.nx = nx;
  d.ny = ny;
  return d;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("default design is a 30 x 30 grid") {
    const FieldSimulator sim(SimDesign{});
    CHECK(sim.locations().size() == 900);
    CHECK(sim.ordering().size() == 900);
  }

  TEST_CASE("linear design reproduces its covariance") {
    const FieldSimulator sim(grid_design(DesignKind::lr, 2, 2));
    const Matrix y = sim.draw(100000, 5);
    const Matrix centered = y.rowwise() - y.colwise().mean();
    const Matrix emp = centered.transpose() * centered / static_cast<double>(y.rows() - 1);
    const Locations ordered = ordered_locations(sim.locations(), sim.ordering());
    const Matrix truth = covariance(sim.design().covariance, ordered.coords, ordered.coords);
    CHECK((emp - truth).cwiseAbs().maxCoeff() < 0.02);
  }

  TEST_CASE("zero amplitude makes the nonlinear design linear") {
    SimDesign nr = grid_design(DesignKind::nr, 6, 5);
    nr.amplitude = 0.0;
    const Matrix a = FieldSimulator(nr).draw(4, 11);
    const Matrix b = FieldSimulator(grid_design(DesignKind::lr, 6, 5)).draw(4, 11);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("the first ordered value has no nonlinear term") {
    const Matrix a = FieldSimulator(grid_design(DesignKind::nr, 6, 5)).draw(10, 3);
    const Matrix b = FieldSimulator(grid_design(DesignKind::lr, 6, 5)).draw(10, 3);
    CHECK((a.col(0) - b.col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - b).cwiseAbs().maxCoeff() > 0.1);
  }

  TEST_CASE("nearest-neighbor coefficients match a dense solve") {
    const FieldSimulator sim(grid_design(DesignKind::nr, 5, 4));
    const Locations ordered = ordered_locations(sim.locations(), sim.ordering());
    const Matrix sigma = covariance(sim.design().covariance, ordered.coords, ordered.coords);
    for (Eigen::Index i = 1; i < 20; ++i) {
      const Vector b = sigma.topLeftCorner(i, i).ldlt().solve(sigma.col(i).head(i));
      const auto& nb = sim.ordering().neighbors[static_cast<std::size_t>(i)];
      CHECK(sim.nearest_coefficient(static_cast<std::size_t>(i), 0) == doctest::Approx(b(nb[0])).epsilon(1e-9));
      if (nb.size() > 1)
        CHECK(sim.nearest_coefficient(static_cast<std::size_t>(i), 1) == doctest::Approx(b(nb[1])).epsilon(1e-9));
    }
  }

  TEST_CASE("nonlinear conditionals have the stated mean and variance") {
    const SimDesign d = grid_design(DesignKind::nr, 4, 4);
    const FieldSimulator sim(d);
    const Locations ordered = ordered_locations(sim.locations(), sim.ordering());
    const Matrix sigma = covariance(d.covariance, ordered.coords, ordered.coords);
    const Matrix y = sim.draw(5000, 21);
    for (Eigen::Index i : {3, 9, 15}) {
      const Vector b = sigma.topLeftCorner(i, i).ldlt().solve(sigma.col(i).head(i));
      const double sd = std::sqrt(sigma(i, i) - sigma.col(i).head(i).dot(b));
      const auto& nb = sim.ordering().neighbors[static_cast<std::size_t>(i)];
      std::vector<double> u;
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const Vector prev = y.row(r).head(i).transpose();
        const double arg = b(nb[0]) * prev(nb[0]) + b(nb[1]) * prev(nb[1]);
        u.push_back((y(r, i) - b.dot(prev) - d.amplitude * std::sin(d.frequency * arg)) / sd);
      }
      const boost::math::normal std_normal;
      CHECK(testing::ks_distance(u, [&](double v) { return boost::math::cdf(std_normal, v); }) < 1.63 / std::sqrt(5000.0));
    }
  }

  TEST_CASE("draws depend only on seed and stream") {
    const FieldSimulator sim(grid_design(DesignKind::nr, 6, 6));
    const Matrix a = sim.draw(5, 9);
    const Matrix b = sim.draw(5, 9);
    CHECK(a == b);
    // stream offsets select rows of a longer draw
    const Matrix tail = sim.draw(2, 9, 3);
    CHECK(tail.row(0) == a.row(3));
    CHECK(tail.row(1) == a.row(4));
    CHECK((sim.draw(5, 10) - a).cwiseAbs().maxCoeff() > 0.0);
    const int before = thread_count();
    set_thread_count(1);
    const Matrix one = sim.draw(5, 9);
    set_thread_count(before);
    CHECK(one == a);
  }

  TEST_CASE("simulate() returns maximin-ordered data") {
    SimDesign d = grid_design(DesignKind::lr, 3, 3);
    d.seed = 4;
    const Simulation s = simulate(d, 3);
    CHECK(s.data.rows() == 3);
    CHECK(s.data.cols() == 9);
    CHECK(s.data == FieldSimulator(d).draw(3, 4));
    CHECK(simulate(d, 0).data.rows() == 0);
  }

  TEST_CASE("invalid designs are rejected") {
    CHECK_THROWS_AS(FieldSimulator(grid_design(DesignKind::lr, 1, 1)), DataError);
    CHECK_THROWS_AS(design_kind_from_string("xyz"), DataError);
    CHECK(design_kind_from_string(to_string(DesignKind::gaussian)) == DesignKind::gaussian);
    // a single row of points is allowed
    CHECK(FieldSimulator(grid_design(DesignKind::lr, 5, 1)).locations().size() == 5);
  }
}
