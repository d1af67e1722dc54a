// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <string>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"

namespace shrinktm {

enum class FamilyKind { exponential, matern };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Isotropic parametric covariance, C(d) = variance * M_nu(d / range) with
///   M_nu(x) = 2^(1-nu) / Gamma(nu) * x^nu * K_nu(x).
/// The exponential family is the nu = 1/2 member. Parameters are held on the log scale.
struct BaseFamily {
  FamilyKind kind = FamilyKind::matern;
  double log_variance = 0.0;
  double log_range = 2.0;
  double log_smoothness = 0.4054651081081644;  // log 1.5
  bool learn_smoothness = true;

  static BaseFamily exponential(double variance, double range);
  static BaseFamily matern(double variance, double range, double smoothness);

  double variance() const;
  double range() const;
  double smoothness() const;

  /// Number of unconstrained parameters the optimizer sees (2 or 3).
  int free_parameters() const;
  std::vector<double> to_vector() const;
  void assign(const std::vector<double>& values);
  std::vector<std::string> parameter_names() const;

  void validate() const;
};

/// Matern correlation M_nu(x) for x >= 0. Closed forms at nu = 1/2, 3/2, 5/2.
double matern_correlation(double x, double nu);

/// C(d) and its derivatives with respect to the free log-parameters
/// (log variance, log range, and log smoothness when learned).
struct CovarianceValue {
  double value = 0.0;
  double d_log_variance = 0.0;
  double d_log_range = 0.0;
  double d_log_smoothness = 0.0;
};

CovarianceValue covariance_with_derivatives(const BaseFamily& family, double distance);
double covariance_at(const BaseFamily& family, double distance);

/// Sigma_{A,B} for two point sets given as rows.
Matrix covariance(const BaseFamily& family, const Matrix& a, const Matrix& b);

}  // namespace shrinktm
