// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/mapkernel.hpp"

#include <algorithm>
#include <cmath>

namespace shrinktm {

std::string to_string(MapKind kind) { return kind == MapKind::shrink ? "shrinktm" : "simpletm"; }

std::string to_string(KernelShape shape) {
  return shape == KernelShape::squared_exponential ? "squared_exponential" : "matern32";
}

MapKind map_kind_from_string(const std::string& name) {
  if (name == "shrinktm" || name == "shrink") return MapKind::shrink;
  if (name == "simpletm" || name == "simple") return MapKind::simple;
  throw DataError("unknown map kind '" + name + "'");
}

KernelShape kernel_shape_from_string(const std::string& name) {
  if (name == "squared_exponential") return KernelShape::squared_exponential;
  if (name == "matern32") return KernelShape::matern32;
  throw DataError("unknown kernel shape '" + name + "'");
}

double HyperParams::cd() const { return std::exp(log_cd); }
double HyperParams::alpha() const { return 2.0 + std::exp(-2.0 * log_cd); }
double HyperParams::gamma() const { return std::exp(theta_gamma); }
double HyperParams::sigma0_sq() const { return std::exp(theta_sigma0); }
double HyperParams::sigma_sq(double scale) const { return std::exp(theta_sigma1 + theta_sigma2 * std::log(scale)); }
int HyperParams::mprime() const { return sparsity_level(theta_q, epsilon, m_max); }

std::vector<double> HyperParams::to_vector() const {
  std::vector<double> v;
  if (kind == MapKind::shrink) v = base.to_vector();
  v.insert(v.end(), {log_cd, theta_sigma1, theta_sigma2, theta_q, theta_gamma, theta_sigma0});
  if (kind == MapKind::simple) v.insert(v.end(), {theta_d1, theta_d2});
  return v;
}

void HyperParams::assign(const std::vector<double>& values) {
  const std::size_t nb = kind == MapKind::shrink ? static_cast<std::size_t>(base.free_parameters()) : 0;
  const std::size_t expected = nb + 6 + (kind == MapKind::simple ? 2 : 0);
  if (values.size() != expected) throw std::invalid_argument("wrong number of hyperparameters");
  if (nb > 0) base.assign(std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(nb)));
  log_cd = values[nb];
  theta_sigma1 = values[nb + 1];
  theta_sigma2 = values[nb + 2];
  theta_q = values[nb + 3];
  theta_gamma = values[nb + 4];
  theta_sigma0 = values[nb + 5];
  if (kind == MapKind::simple) {
    theta_d1 = values[nb + 6];
    theta_d2 = values[nb + 7];
  }
}

std::vector<std::string> HyperParams::parameter_names() const {
  std::vector<std::string> names;
  if (kind == MapKind::shrink) names = base.parameter_names();
  names.insert(names.end(), {"log_cd", "theta_sigma1", "theta_sigma2", "theta_q", "theta_gamma", "theta_sigma0"});
  if (kind == MapKind::simple) names.insert(names.end(), {"theta_d1", "theta_d2"});
  return names;
}

int sparsity_level(double theta_q, double epsilon, int m_max) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const double rate = std::exp(theta_q);
  if (rate == 0.0) return m_max;
  const double bound = -std::log(epsilon) / rate;
  if (!(bound < m_max)) return m_max;
  int k = static_cast<int>(std::floor(bound));
  // floor can land one off when the bound is within rounding of an integer
  while (k + 1 <= m_max && std::exp(-rate * (k + 1)) >= epsilon) ++k;
  while (k > 0 && std::exp(-rate * k) < epsilon) --k;
  return std::clamp(k, 0, m_max);
}

Vector relevance_weights(double theta_q, int count) {
  Vector q(count);
  const double rate = std::exp(theta_q);
  for (int k = 0; k < count; ++k) q(k) = std::exp(-rate * (k + 1));
  return q;
}

PriorMoments prior_moments(const HyperParams& hp, const BaseCoefficients& base, const Ordering& ordering) {
  if (base.size() != ordering.size()) throw DataError("base coefficients do not match the ordering");
  PriorMoments pm;
  pm.alpha = hp.alpha();
  pm.mprime = hp.mprime();
  const double ratio = pm.alpha - 1.0;  // 1 + 1/c_d^2
  const std::size_t n = base.size();
  pm.beta.resize(n);
  pm.sigma2.resize(n);
  pm.q.resize(n);
  const Vector qall = relevance_weights(hp.theta_q, pm.mprime);
  for (std::size_t i = 0; i < n; ++i) {
    pm.beta[i] = ratio * base.tau2[i];
    pm.sigma2[i] = hp.sigma_sq(ordering.scales[i]);
    const int width = std::min<int>(pm.mprime, static_cast<int>(ordering.neighbors[i].size()));
    pm.q[i] = qall.head(width);
  }
  return pm;
}

BaseCoefficients simple_base(const HyperParams& hp, const Ordering& ordering) {
  BaseCoefficients b;
  const std::size_t n = ordering.size();
  b.cond.assign(n, {});
  b.xi.assign(n, Vector());
  b.tau2.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    b.tau2[i] = std::exp(hp.theta_d1 + hp.theta_d2 * std::log(ordering.scales[i]));
  return b;
}

namespace {

double rho(KernelShape shape, double h2_over_gamma2) {
  if (shape == KernelShape::squared_exponential) return std::exp(-0.5 * h2_over_gamma2);
  const double t = std::sqrt(3.0 * h2_over_gamma2);
  return (1.0 + t) * std::exp(-t);
}

}  // namespace

double ComponentKernel::value(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                   const Eigen::Ref<const Eigen::RowVectorXd>& b) const {
  if (width() == 0) return 0.0;
  double lin = 0.0, h2 = 0.0;
  for (int k = 0; k < width(); ++k) {
    lin += qdiag(k) * a(k) * b(k);
    const double d = a(k) - b(k);
    h2 += qdiag(k) * d * d;
  }
  return sigma0_sq * lin + sigma_sq * rho(shape, h2 / (gamma * gamma));
}

Matrix ComponentKernel::covariance(const Matrix& a, const Matrix& b) const {
  Matrix out = Matrix::Zero(a.rows(), b.rows());
  if (width() == 0) return out;
  if (a.cols() != width() || b.cols() != width()) throw DataError("kernel input width does not match m'");
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < b.rows(); ++c) out(r, c) = value(a.row(r), b.row(c));
  return out;
}

ComponentKernel component_kernel(const HyperParams& hp, const PriorMoments& moments, std::size_t i) {
  ComponentKernel k;
  k.qdiag = moments.q[i].array().square();
  k.sigma0_sq = hp.sigma0_sq();
  k.sigma_sq = moments.sigma2[i];
  k.gamma = hp.gamma();
  k.shape = hp.shape;
  return k;
}

Matrix kernel_matrix(const HyperParams& hp, const PriorMoments& moments, const BaseCoefficients& base,
                     std::size_t i, const Matrix& x, const Matrix& x2) {
  return component_kernel(hp, moments, i).covariance(x, x2) / base.tau2[i];
}

}  // namespace shrinktm
