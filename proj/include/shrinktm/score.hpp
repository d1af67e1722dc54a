// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/matcov.hpp"
#include "shrinktm/optimize.hpp"
#include "shrinktm/posterior.hpp"
#include "shrinktm/simulate.hpp"

namespace shrinktm {

/// Mean over replicates of the log predictive density; test is n x N in maximin order.
double log_score(const FittedMap& map, const Matrix& test);
/// Same for a Gaussian field whose locations are in the test's column order.
double log_score(const GaussianField& field, const Matrix& test);

/// n x N standard-normal reference draws; row j uses the RNG stream (seed, j).
Matrix reference_draws(std::size_t n, std::size_t width, std::uint64_t seed);

/// RMSE at positions k..N-1 of the mean of `draws` conditional samples given
/// the first k values of `truth` (maximin order). Requires 0 <= k < N.
double conditional_rmse(const FittedMap& map, const Vector& truth, std::size_t k, std::size_t draws,
                        std::uint64_t seed);
/// Exact Gaussian conditioning; `field` locations must follow the truth's order.
double conditional_rmse(const GaussianField& field, const Vector& truth, std::size_t k);

enum class Method { shrinktm, simpletm, matcov };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  SimDesign design;
  std::vector<Method> methods{Method::shrinktm, Method::simpletm, Method::matcov};
  std::vector<std::size_t> ns{1, 2, 5, 10};
  int replications = 10;
  std::uint64_t seed = 1;
  std::size_t test_size = 20;
  /// Fitting configuration shared by the transport-map methods; `init` is replaced per method.
  OptimizerConfig optimizer;
  HyperParams shrink_init = default_hyperparams(MapKind::shrink);
  HyperParams simple_init = default_hyperparams(MapKind::simple);
  MatCovConfig matcov;
  /// Additionally record conditional-simulation RMSE with this observed prefix (0 disables).
  std::size_t rmse_observed = 0;
  std::size_t rmse_draws = 50;
};

struct ResultRow {
  std::string method;
  std::size_t n = 0;
  int replication = 0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

/// Seed of replication r: every run with the same (seed, r) sees the same data.
std::uint64_t replication_seed(std::uint64_t seed, int replication);

/// Runs methods x ns x replications. Per combination: a "logscore" row (per-field
/// mean log density), a "logscore_per_location" row (the same divided by N), and an
/// "rmse" row when rmse_observed > 0.
/// `progress`, if set, is called after each row.
std::vector<ResultRow> compare(const ExperimentConfig& config,
                               const std::function<void(const ResultRow&)>& progress = {});

/// method,n,replication,metric,value,seed,seconds
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace shrinktm
