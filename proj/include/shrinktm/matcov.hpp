// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "shrinktm/common.hpp"
#include "shrinktm/covariance.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/optimize.hpp"

namespace shrinktm {

/// Zero-mean Gaussian field with a parametric covariance on a fixed set of
/// locations. Factorizes the dense covariance once.
class GaussianField {
 public:
  GaussianField(const BaseFamily& family, const Locations& locs);

  /// Exact log-density of each row of y (columns follow the locations).
  Vector log_density_rows(const Matrix& y) const;
  /// n independent draws; row j uses the RNG stream (seed, j).
  Matrix sample(std::size_t n, std::uint64_t seed) const;
  /// E[y_rest | y_observed] where the first observed.size() locations are observed.
  Vector conditional_mean(const Vector& observed) const;
  /// n draws of the whole field with the first observed.size() values fixed; row j
  /// uses the RNG stream (seed, j).
  Matrix conditional_sample(const Vector& observed, std::size_t n, std::uint64_t seed) const;

  const Matrix& covariance() const { return sigma_; }
  const BaseFamily& family() const { return family_; }

 private:
  BaseFamily family_;
  Matrix sigma_;
  Eigen::LLT<Matrix> chol_;
};

struct MatCovConfig {
  AdamConfig adam{.learning_rate = 0.05, .iterations = 300};
  FamilyKind kind = FamilyKind::matern;
  bool learn_smoothness = true;
  double init_smoothness = 1.5;
  /// Exact likelihood up to this many locations, Vecchia above.
  std::size_t exact_limit = 2000;
  int vecchia_m = 30;
  /// Starting point; by default variance = mean square of the data and range = diameter / 10.
  std::optional<BaseFamily> init;
};

struct MatCovFit {
  BaseFamily family;
  double loglik = 0.0;
  FitTrace trace;
};

/// Gaussian log-likelihood of the rows of y under `family`: exact, or Vecchia
/// with conditioning size `vecchia_m` when N exceeds `exact_limit`.
double gaussian_loglik(const BaseFamily& family, const Matrix& y, const Locations& locs,
                       std::size_t exact_limit = 2000, int vecchia_m = 30);

/// Maximum-likelihood fit of (variance, range[, smoothness]) with the shared Adam optimizer.
/// y is n x N in the row order of locs. Throws DataError("degenerate data") for a
/// field with zero variance.
MatCovFit matcov_mle(const Matrix& y, const Locations& locs, const MatCovConfig& config = {});

}  // namespace shrinktm
