// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/mapkernel.hpp"
#include "shrinktm/posterior.hpp"

namespace shrinktm {

/// Adam with a cosine-annealed learning rate,
///   lr(t) = floor + (lr0 - floor) * (1 + cos(pi t / T)) / 2,  t = 0..T-1.
struct AdamConfig {
  double learning_rate = 0.01;
  int iterations = 500;
  double lr_floor = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Stop when |f_t - f_{t-w}| <= tol * max(1, |f_t|) with w = early_stop_window.
  int early_stop_window = 20;
  double early_stop_tol = 1e-6;
  /// Warn (no error) when the best objective has not improved for this many iterations.
  int stall_window = 50;
  /// Consecutive failed evaluations tolerated before giving up.
  int max_failures = 10;
};

double cosine_learning_rate(const AdamConfig& config, int t);

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::vector<double> theta;
  double seconds = 0.0;
};

struct FitTrace {
  std::vector<std::string> names;
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;

  /// iter,objective,grad_norm,<names...>,seconds
  void write_csv(std::ostream& out) const;
};

struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// fn(theta, iteration) returns the objective and its gradient at theta.
using ObjectiveFn = std::function<Evaluation(const std::vector<double>&, int)>;

struct AdamResult {
  std::vector<double> theta;  // best observed
  double value = 0.0;
  FitTrace trace;
};

/// Maximizes fn from init. The returned point is the best one evaluated.
/// Throws NumericError("bad initialization") if the objective is not finite at init,
/// and NumericError carrying the last iterate if evaluations keep failing.
AdamResult adam_maximize(const ObjectiveFn& fn, std::vector<double> init, const AdamConfig& config,
                         std::vector<std::string> names = {});

enum class GradientMode { analytic, finite_difference };

struct OptimizerConfig {
  HyperParams init;
  AdamConfig adam;
  GradientMode gradient = GradientMode::analytic;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
  /// Fraction of components per gradient step; 1 means full batch.
  double subsample = 1.0;
  std::optional<std::size_t> first_location;
};

/// Default initial hyperparameters for each map kind. The kernel range and
/// linear-term variance start small (gamma = e^-2, sigma_0^2 = e^-3).
HyperParams default_hyperparams(MapKind kind);

struct MapFit {
  HyperParams hp;
  FittedMap map;
  FitTrace trace;
  double objective = 0.0;
};

/// Empirical-Bayes fit: orders the locations, maximizes the integrated
/// likelihood over theta and refits the map at the best theta.
/// `y` is n x N in the column order of `locs`.
MapFit fit(const Matrix& y, const Locations& locs, const OptimizerConfig& config);
/// Same, with the ordering given and `y` already in maximin order.
MapFit fit_ordered(const Matrix& y, const Locations& locs, const Ordering& ordering, const OptimizerConfig& config);

}  // namespace shrinktm
