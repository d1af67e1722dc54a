// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "shrinktm/objective.hpp"
#include "shrinktm/optimize.hpp"
#include "shrinktm/simulate.hpp"

using namespace shrinktm;

namespace {

Simulation small_lr(std::size_t n, int nx = 10, int ny = 5) {
  SimDesign d;
  d.nx = nx;
  d.ny = ny;
  return simulate(d, n);
}

std::size_t index_of(const HyperParams& hp, const std::string& name) {
  const auto names = hp.parameter_names();
  return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

ObjectiveFn quadratic(const std::vector<double>& target) {
  return [target](const std::vector<double>& th, int) {
    Evaluation e;
    e.gradient.resize(static_cast<Eigen::Index>(th.size()));
    for (std::size_t j = 0; j < th.size(); ++j) {
      e.value -= (th[j] - target[j]) * (th[j] - target[j]);
      e.gradient(static_cast<Eigen::Index>(j)) = -2.0 * (th[j] - target[j]);
    }
    return e;
  };
}

}  // namespace

TEST_SUITE("optimize") {
  TEST_CASE("cosine schedule") {
    AdamConfig c;
    c.learning_rate = 0.01;
    c.iterations = 100;
    CHECK(cosine_learning_rate(c, 0) == doctest::Approx(0.01));
    CHECK(cosine_learning_rate(c, 50) == doctest::Approx(0.005));
    CHECK(cosine_learning_rate(c, 100) == doctest::Approx(0.0));
    c.lr_floor = 0.001;
    CHECK(cosine_learning_rate(c, 100) == doctest::Approx(0.001));
    for (int t = 1; t <= 100; ++t) CHECK(cosine_learning_rate(c, t) <= cosine_learning_rate(c, t - 1));
  }

  TEST_CASE("Adam reaches the maximizer of a concave quadratic") {
    const std::vector<double> target{0.5, -1.0, 1.5};
    AdamConfig c;
    c.learning_rate = 0.05;
    c.iterations = 500;
    c.early_stop_window = 0;
    const AdamResult r = adam_maximize(quadratic(target), {0.0, 0.0, 0.0}, c);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(r.theta[j] - target[j]) < 1e-3);
    CHECK(r.trace.rows.size() == 500);
    CHECK(r.trace.names == std::vector<std::string>{"theta0", "theta1", "theta2"});
  }

  TEST_CASE("one iteration returns the initial point after one evaluation") {
    int calls = 0;
    auto fn = [&](const std::vector<double>& th, int t) {
      ++calls;
      return quadratic({1.0})(th, t);
    };
    AdamConfig c;
    c.iterations = 1;
    const AdamResult r = adam_maximize(fn, {0.25}, c);
    CHECK(calls == 1);
    CHECK(r.theta == std::vector<double>{0.25});
    CHECK(r.value == doctest::Approx(-0.5625));
    CHECK(r.trace.rows.size() == 1);
  }

  TEST_CASE("invalid settings and bad starts are rejected") {
    AdamConfig c;
    c.iterations = 0;
    CHECK_THROWS_AS(adam_maximize(quadratic({0.0}), {0.0}, c), std::invalid_argument);
    c.iterations = 10;
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(adam_maximize(quadratic({0.0}), {0.0}, c), std::invalid_argument);
    c.learning_rate = 0.01;
    auto nan_fn = [](const std::vector<double>&, int) {
      Evaluation e;
      e.value = std::nan("");
      e.gradient = Vector::Zero(1);
      return e;
    };
    CHECK_THROWS_WITH_AS(adam_maximize(nan_fn, {0.0}, c), "bad initialization", NumericError);
  }

  TEST_CASE("failed evaluations back off, and persistent failure is an error") {
    AdamConfig c;
    c.iterations = 60;
    c.learning_rate = 0.1;
    c.early_stop_window = 0;
    auto flaky = [](const std::vector<double>& th, int t) {
      if (t % 7 == 3) throw NumericError("transient");
      return quadratic({1.0})(th, t);
    };
    const AdamResult r = adam_maximize(flaky, {0.0}, c);
    CHECK(r.value > -1.0);
    auto broken = [](const std::vector<double>& th, int t) {
      if (t > 0) throw NumericError("always");
      return quadratic({1.0})(th, t);
    };
    CHECK_THROWS_AS(adam_maximize(broken, {0.0}, c), NumericError);
  }

  TEST_CASE("a flat objective triggers the stall warning but no error") {
    AdamConfig c;
    c.iterations = 80;
    c.early_stop_window = 0;
    auto flat = [](const std::vector<double>&, int) {
      Evaluation e;
      e.gradient = Vector::Constant(1, 1.0);
      return e;
    };
    const AdamResult r = adam_maximize(flat, {0.0}, c);
    CHECK(r.trace.warnings.size() == 1);
    CHECK(r.trace.rows.size() == 80);
  }

  TEST_CASE("analytic gradient matches central differences") {
    const Simulation sim = small_lr(3);
    const MapObjective obj(sim.data, sim.locs, sim.ordering);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto kind : {MapKind::shrink, MapKind::simple}) {
      for (int trial = 0; trial < 5; ++trial) {
        HyperParams hp = default_hyperparams(kind);
        hp.base = BaseFamily::matern(1.0, 0.3, 1.0);  // well conditioned, so central differences are accurate
        std::vector<double> v = hp.to_vector();
        for (double& x : v) x += 0.5 * u(rng);
        hp.assign(v);
        const Vector a = obj.evaluate(hp).gradient;
        const Vector f = obj.finite_difference_gradient(hp);
        REQUIRE(a.size() == static_cast<Eigen::Index>(v.size()));
        const double scale = f.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < a.size(); ++j)
          CHECK(std::abs(a(j) - f(j)) <= 1e-4 * std::max(std::abs(f(j)), 1e-3 * scale));
      }
    }
  }

  TEST_CASE("kernel range gets no gradient from a single replicate") {
    const Simulation sim = small_lr(1);
    const MapObjective obj(sim.data, sim.locs, sim.ordering);
    const HyperParams hp = default_hyperparams(MapKind::shrink);
    const Vector g = obj.evaluate(hp).gradient;
    CHECK(g(static_cast<Eigen::Index>(index_of(hp, "theta_gamma"))) == 0.0);
  }

  TEST_CASE("subset evaluation rescales to the full objective size") {
    const Simulation sim = small_lr(2);
    const MapObjective obj(sim.data, sim.locs, sim.ordering);
    const HyperParams hp = default_hyperparams(MapKind::shrink);
    std::vector<std::size_t> all(sim.ordering.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto full = obj.evaluate(hp);
    const auto same = obj.evaluate(hp, true, std::nullopt, all);
    CHECK(same.value == doctest::Approx(full.value).epsilon(1e-12));
    CHECK((same.gradient - full.gradient).norm() <= 1e-10 * full.gradient.norm());
  }

  TEST_CASE("fitting improves on the start and is reproducible") {
    const Simulation sim = small_lr(2, 6, 6);
    OptimizerConfig c;
    c.init = default_hyperparams(MapKind::shrink);
    c.adam.iterations = 30;
    const MapFit a = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    const MapFit b = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    CHECK(a.objective >= a.trace.rows.front().objective);
    CHECK(a.objective == b.objective);
    CHECK(a.hp.to_vector() == b.hp.to_vector());
    CHECK(a.trace.rows.size() <= 30);
    CHECK(a.trace.names == c.init.parameter_names());
    // every traced m' is a valid sparsity level
    const std::size_t q = index_of(c.init, "theta_q");
    for (const auto& row : a.trace.rows) {
      const int mp = sparsity_level(row.theta[q], c.init.epsilon);
      CHECK(mp >= 0);
      CHECK(mp <= 30);
    }
    // the refitted map uses the returned hyperparameters
    CHECK(a.map.mprime == a.hp.mprime());
    CHECK(a.map.replicates == 2);
  }

  TEST_CASE("thread count does not change the result") {
    const Simulation sim = small_lr(2, 6, 6);
    OptimizerConfig c;
    c.init = default_hyperparams(MapKind::shrink);
    c.adam.iterations = 10;
    const int before = thread_count();
    set_thread_count(1);
    const MapFit one = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    set_thread_count(3);
    const MapFit three = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    set_thread_count(before);
    CHECK(std::abs(one.objective - three.objective) <= 1e-10 * std::abs(one.objective));
    const auto x = one.hp.to_vector(), y = three.hp.to_vector();
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(x[j] - y[j]) < 1e-10);
  }

  TEST_CASE("finite-difference and subsampled modes run") {
    const Simulation sim = small_lr(2, 5, 5);
    OptimizerConfig c;
    c.init = default_hyperparams(MapKind::simple);
    c.adam.iterations = 5;
    c.gradient = GradientMode::finite_difference;
    const MapFit fd = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    CHECK(std::isfinite(fd.objective));
    c.gradient = GradientMode::analytic;
    c.subsample = 0.5;
    const MapFit sub = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    CHECK(std::isfinite(sub.objective));
    CHECK(sub.objective >= sub.trace.rows.front().objective);
  }

  TEST_CASE("file-order entry point orders the data itself") {
    const Simulation sim = small_lr(2, 5, 5);
    OptimizerConfig c;
    c.init = default_hyperparams(MapKind::shrink);
    c.adam.iterations = 3;
    const MapFit direct = fit_ordered(sim.data, sim.locs, sim.ordering, c);
    const MapFit viafile = fit(to_file_order(sim.data, sim.ordering), sim.locs, c);
    CHECK(viafile.objective == doctest::Approx(direct.objective).epsilon(1e-12));
    CHECK_THROWS_AS(fit(Matrix(0, 25), sim.locs, c), DataError);
  }
}
