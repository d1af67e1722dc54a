// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "shrinktm/objective.hpp"

namespace shrinktm {

double cosine_learning_rate(const AdamConfig& config, int t) {
  const double frac = static_cast<double>(t) / static_cast<double>(config.iterations);
  return config.lr_floor + (config.learning_rate - config.lr_floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

void FitTrace::write_csv(std::ostream& out) const {
  out << "iter,objective,grad_norm";
  for (const auto& n : names) out << ',' << n;
  out << ",seconds\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.objective << ',' << r.grad_norm;
    for (double v : r.theta) out << ',' << v;
    out << ',' << r.seconds << '\n';
  }
}

namespace {

std::string describe(const std::vector<double>& theta) {
  std::ostringstream s;
  s.precision(10);
  s << '(';
  for (std::size_t i = 0; i < theta.size(); ++i) s << (i ? ", " : "") << theta[i];
  s << ')';
  return s.str();
}

}  // namespace

AdamResult adam_maximize(const ObjectiveFn& fn, std::vector<double> init, const AdamConfig& config,
                         std::vector<std::string> names) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (config.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  const std::size_t dim = init.size();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  AdamResult res;
  res.trace.names = std::move(names);
  if (res.trace.names.size() != dim) {
    res.trace.names.clear();
    for (std::size_t j = 0; j < dim; ++j) res.trace.names.push_back("theta" + std::to_string(j));
  }

  Evaluation cur;
  try {
    cur = fn(init, 0);
  } catch (const NumericError&) {
    throw NumericError("bad initialization");
  }
  if (!std::isfinite(cur.value) || !cur.gradient.allFinite()) throw NumericError("bad initialization");

  std::vector<double> theta = init, last_good = init;
  res.theta = init;
  res.value = cur.value;
  Vector m1 = Vector::Zero(static_cast<Eigen::Index>(dim)), m2 = m1;
  int adam_step = 0, failures = 0, last_improvement = 0;
  double damping = 1.0;
  bool warned_stall = false;

  for (int t = 0; t < config.iterations; ++t) {
    if (t > 0) {
      bool ok = true;
      try {
        cur = fn(theta, t);
        ok = std::isfinite(cur.value) && cur.gradient.allFinite();
      } catch (const NumericError&) {
        ok = false;
      }
      if (!ok) {
        if (++failures >= config.max_failures)
          throw NumericError("optimizer diverged; last iterate " + describe(theta));
        theta = last_good;
        damping *= 0.5;
        continue;
      }
      failures = 0;
    }
    last_good = theta;
    res.trace.rows.push_back({t, cur.value, cur.gradient.norm(), theta, elapsed()});
    if (cur.value > res.value) {
      res.value = cur.value;
      res.theta = theta;
      last_improvement = t;
    }
    if (!warned_stall && t - last_improvement >= config.stall_window) {
      res.trace.warnings.push_back("objective has not improved for " + std::to_string(config.stall_window) +
                                   " iterations (since iteration " + std::to_string(last_improvement) + ")");
      warned_stall = true;
    }
    const auto& rows = res.trace.rows;
    const auto w = static_cast<std::size_t>(config.early_stop_window);
    if (w > 0 && rows.size() > w) {
      const double prev = rows[rows.size() - 1 - w].objective;
      if (std::abs(cur.value - prev) <= config.early_stop_tol * std::max(1.0, std::abs(cur.value))) break;
    }
    if (t + 1 == config.iterations) break;

    // ascent step
    ++adam_step;
    const double lr = cosine_learning_rate(config, t) * damping;
    const double c1 = 1.0 - std::pow(config.beta1, adam_step);
    const double c2 = 1.0 - std::pow(config.beta2, adam_step);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double g = cur.gradient(jj);
      m1(jj) = config.beta1 * m1(jj) + (1.0 - config.beta1) * g;
      m2(jj) = config.beta2 * m2(jj) + (1.0 - config.beta2) * g * g;
      theta[j] += lr * (m1(jj) / c1) / (std::sqrt(m2(jj) / c2) + config.eps);
    }
  }
  return res;
}

HyperParams default_hyperparams(MapKind kind) {
  HyperParams hp;
  hp.kind = kind;
  hp.theta_gamma = -2.0;
  hp.theta_sigma0 = -3.0;
  return hp;
}

MapFit fit_ordered(const Matrix& y, const Locations& locs, const Ordering& ordering, const OptimizerConfig& config) {
  if (y.rows() < 1) throw DataError("fitting needs at least one replicate");
  const HyperParams& init = config.init;
  const MapObjective objective(y, locs, ordering, init.m);
  const std::size_t big_n = ordering.size();

  std::mt19937_64 rng(config.seed);
  const bool subsample = config.subsample < 1.0 && config.gradient == GradientMode::analytic;
  const std::size_t batch = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.subsample * static_cast<double>(big_n))));
  std::vector<std::size_t> order(big_n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto fn = [&](const std::vector<double>& theta, int) {
    HyperParams hp = init;
    hp.assign(theta);
    Evaluation e;
    if (config.gradient == GradientMode::finite_difference) {
      e.value = objective.evaluate(hp, false).value;
      e.gradient = objective.finite_difference_gradient(hp, config.fd_step);
      return e;
    }
    if (subsample) {
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::size_t> pick(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(batch));
      std::sort(pick.begin(), pick.end());
      // the objective value used for best-seen selection stays full-batch
      e.value = objective.evaluate(hp, false).value;
      e.gradient = objective.evaluate(hp, true, std::nullopt, pick).gradient;
      return e;
    }
    auto r = objective.evaluate(hp, true);
    e.value = r.value;
    e.gradient = std::move(r.gradient);
    return e;
  };

  AdamResult best = adam_maximize(fn, init.to_vector(), config.adam, init.parameter_names());
  MapFit out;
  out.hp = init;
  out.hp.assign(best.theta);
  out.objective = best.value;
  out.trace = std::move(best.trace);
  out.map = fit_components(y, out.hp, ordering, objective.base(out.hp));
  return out;
}

MapFit fit(const Matrix& y, const Locations& locs, const OptimizerConfig& config) {
  const Ordering ordering = maximin_order(locs, config.first_location, config.init.m_max);
  return fit_ordered(to_maximin(y, ordering), locs, ordering, config);
}

}  // namespace shrinktm
