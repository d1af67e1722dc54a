// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <string>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/covariance.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/vecchia.hpp"

namespace shrinktm {

/// shrink: map components centred on the Vecchia base. simple: no base mean
/// (xi = 0) and tau_i^2 = exp(theta_d1) * l_i^theta_d2, the BTM-style baseline.
enum class MapKind { shrink, simple };
/// Isotropic correlation rho used by the nonlinear part of the kernel.
enum class KernelShape { squared_exponential, matern32 };

std::string to_string(MapKind kind);
std::string to_string(KernelShape shape);
MapKind map_kind_from_string(const std::string& name);
KernelShape kernel_shape_from_string(const std::string& name);

/// All hyperparameters of the map prior. Every learnable quantity is stored on an
/// unconstrained scale; constrained values are derived.
struct HyperParams {
  MapKind kind = MapKind::shrink;
  BaseFamily base;              // theta_p, only used by MapKind::shrink
  double log_cd = 0.0;          // c_d = exp(log_cd)
  double theta_sigma1 = 0.0;    // sigma_i^2 = exp(theta_sigma1) * l_i^theta_sigma2
  double theta_sigma2 = 0.0;
  double theta_q = -1.0;        // relevance decay, q_k = exp(-exp(theta_q) k)
  double theta_gamma = 0.0;     // gamma = exp(theta_gamma)
  double theta_sigma0 = 0.0;    // sigma_0^2 = exp(theta_sigma0)
  double theta_d1 = 0.0;        // simple mode only
  double theta_d2 = 0.0;
  double epsilon = 0.01;
  int m = 30;
  int m_max = 30;
  KernelShape shape = KernelShape::squared_exponential;

  double cd() const;
  double alpha() const;
  double gamma() const;
  double sigma0_sq() const;
  double sigma_sq(double scale) const;
  int mprime() const;

  /// Unconstrained parameter vector seen by the optimizer, and its names.
  std::vector<double> to_vector() const;
  void assign(const std::vector<double>& values);
  std::vector<std::string> parameter_names() const;
};

/// m' = max{k >= 0 : exp(-e^theta_q k) >= eps}, clamped to m_max.
int sparsity_level(double theta_q, double epsilon, int m_max = 30);

/// Relevance weights q_k = exp(-e^theta_q k), k = 1..count.
Vector relevance_weights(double theta_q, int count);

struct PriorMoments {
  double alpha = 0.0;
  std::vector<double> beta;
  std::vector<double> sigma2;
  std::vector<Vector> q;  // over the first p'_i neighbors of each component
  int mprime = 0;
};

PriorMoments prior_moments(const HyperParams& hp, const BaseCoefficients& base, const Ordering& ordering);

/// Base coefficients of the simple mode: empty conditioning sets and scale-law variances.
BaseCoefficients simple_base(const HyperParams& hp, const Ordering& ordering);

/// Everything needed to evaluate C_i for one component.
struct ComponentKernel {
  Vector qdiag;  // diagonal of Q_i, i.e. q_k^2
  double sigma0_sq = 0.0;
  double sigma_sq = 0.0;
  double gamma = 1.0;
  KernelShape shape = KernelShape::squared_exponential;

  int width() const { return static_cast<int>(qdiag.size()); }
  /// C(x, x') for rows x of a, x' of b. Zero when width() == 0.
  Matrix covariance(const Matrix& a, const Matrix& b) const;
  double value(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                    const Eigen::Ref<const Eigen::RowVectorXd>& b) const;
};

ComponentKernel component_kernel(const HyperParams& hp, const PriorMoments& moments, std::size_t i);

/// K_i(X, X') = C_i(X, X') / tau_i^2; rows are values at g_m'(i).
Matrix kernel_matrix(const HyperParams& hp, const PriorMoments& moments, const BaseCoefficients& base,
                     std::size_t i, const Matrix& x, const Matrix& x2);

}  // namespace shrinktm
