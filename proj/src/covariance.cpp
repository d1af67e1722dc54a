// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/covariance.hpp"

#include <cmath>

namespace shrinktm {

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-14; }

// x^(nu+1) K_{nu-1}(x) scaled like M_nu, i.e. -x dM_nu/dx.
double matern_log_range_factor(double x, double nu) {
  if (x <= 0.0) return 0.0;
  const double e = std::exp(-x);
  if (near(nu, 0.5)) return x * e;
  if (near(nu, 1.5)) return x * x * e;
  if (near(nu, 2.5)) return x * x * (1.0 + x) * e / 3.0;
  if (x > 700.0) return 0.0;
  const double lognorm = (1.0 - nu) * std::log(2.0) - std::lgamma(nu);
  return std::exp(lognorm + (nu + 1.0) * std::log(x)) * std::cyl_bessel_k(std::abs(nu - 1.0), x);
}

}  // namespace

std::string to_string(FamilyKind kind) { return kind == FamilyKind::exponential ? "exponential" : "matern"; }

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "exponential") return FamilyKind::exponential;
  if (name == "matern") return FamilyKind::matern;
  throw DataError("unknown covariance family '" + name + "'");
}

BaseFamily BaseFamily::exponential(double variance, double range) {
  BaseFamily f;
  f.kind = FamilyKind::exponential;
  f.log_variance = std::log(variance);
  f.log_range = std::log(range);
  f.log_smoothness = std::log(0.5);
  f.learn_smoothness = false;
  f.validate();
  return f;
}

BaseFamily BaseFamily::matern(double variance, double range, double smoothness) {
  BaseFamily f;
  f.kind = FamilyKind::matern;
  f.log_variance = std::log(variance);
  f.log_range = std::log(range);
  f.log_smoothness = std::log(smoothness);
  f.validate();
  return f;
}

double BaseFamily::variance() const { return std::exp(log_variance); }
double BaseFamily::range() const { return std::exp(log_range); }
double BaseFamily::smoothness() const { return kind == FamilyKind::exponential ? 0.5 : std::exp(log_smoothness); }

int BaseFamily::free_parameters() const { return kind == FamilyKind::matern && learn_smoothness ? 3 : 2; }

std::vector<double> BaseFamily::to_vector() const {
  std::vector<double> v{log_variance, log_range};
  if (free_parameters() == 3) v.push_back(log_smoothness);
  return v;
}

void BaseFamily::assign(const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != free_parameters())
    throw std::invalid_argument("wrong number of base covariance parameters");
  log_variance = values[0];
  log_range = values[1];
  if (free_parameters() == 3) log_smoothness = values[2];
}

std::vector<std::string> BaseFamily::parameter_names() const {
  std::vector<std::string> names{"log_variance", "log_range"};
  if (free_parameters() == 3) names.emplace_back("log_smoothness");
  return names;
}

void BaseFamily::validate() const {
  const double v = variance(), r = range(), s = smoothness();
  if (!(std::isfinite(v) && v > 0.0 && std::isfinite(r) && r > 0.0 && std::isfinite(s) && s > 0.0))
    throw std::invalid_argument("covariance parameters must be finite and positive");
}

double matern_correlation(double x, double nu) {
  if (x <= 0.0) return 1.0;
  const double e = std::exp(-x);
  if (near(nu, 0.5)) return e;
  if (near(nu, 1.5)) return (1.0 + x) * e;
  if (near(nu, 2.5)) return (1.0 + x + x * x / 3.0) * e;
  if (x > 700.0) return 0.0;
  // K_nu via the standard library's modified Bessel function of the second kind.
  const double lognorm = (1.0 - nu) * std::log(2.0) - std::lgamma(nu);
  return std::exp(lognorm + nu * std::log(x)) * std::cyl_bessel_k(nu, x);
}

CovarianceValue covariance_with_derivatives(const BaseFamily& family, double distance) {
  const double var = family.variance();
  const double nu = family.smoothness();
  const double x = distance / family.range();
  CovarianceValue out;
  out.value = var * matern_correlation(x, nu);
  out.d_log_variance = out.value;
  out.d_log_range = var * matern_log_range_factor(x, nu);
  if (family.free_parameters() == 3 && x > 0.0) {
    // No closed form for dK_nu/dnu; central difference in log nu.
    constexpr double h = 1e-5;
    const double up = matern_correlation(x, nu * std::exp(h));
    const double dn = matern_correlation(x, nu * std::exp(-h));
    out.d_log_smoothness = var * (up - dn) / (2.0 * h);
  }
  return out;
}

double covariance_at(const BaseFamily& family, double distance) {
  return family.variance() * matern_correlation(distance / family.range(), family.smoothness());
}

Matrix covariance(const BaseFamily& family, const Matrix& a, const Matrix& b) {
  family.validate();
  if (a.cols() != b.cols()) throw DataError("point sets have different dimensions");
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = covariance_at(family, (a.row(i) - b.row(j)).norm());
  return out;
}

}  // namespace shrinktm
