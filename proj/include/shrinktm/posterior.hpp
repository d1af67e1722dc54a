// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/mapkernel.hpp"
#include "shrinktm/vecchia.hpp"

namespace shrinktm {

/// Posterior quantities of one map component.
struct ComponentFit {
  std::vector<int> cond;    // g_m(i), carries the base mean xi
  Vector xi;
  double tau2 = 1.0;
  std::vector<int> inputs;  // g_m'(i), inputs of the nonlinear kernel
  ComponentKernel kernel;
  Matrix design;            // n x p', training values at `inputs`
  Matrix g_factor;          // lower Cholesky factor of G_i = K_i + I_n
  Vector weights;           // G_i^{-1} (y_i - Y_cond xi)
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_tilde = 0.0;
  double beta_tilde = 0.0;

  double d2() const { return beta_tilde / alpha_tilde; }
};

/// Predictive t distribution of y_i given its predecessors:
/// (y_i - mean) / scale ~ t_dof.
struct Predictive {
  double mean = 0.0;
  double scale = 1.0;
  double dof = 1.0;
};

/// The trained triangular map. Immutable once built.
struct FittedMap {
  HyperParams hp;
  Ordering ordering;
  std::size_t replicates = 0;
  int mprime = 0;
  std::vector<ComponentFit> components;

  std::size_t size() const { return components.size(); }

  /// Only entries of `y` before position i are read.
  Predictive predict(std::size_t i, const Eigen::Ref<const Vector>& y) const;
};

/// Conjugate posterior of every component given training data Y (n x N, maximin order).
/// n = 0 gives the prior-predictive map.
FittedMap fit_components(const Matrix& y, const HyperParams& hp, const Ordering& ordering,
                         const BaseCoefficients& base);

/// z = T(y). `clamped`, when given, receives the number of components that hit the z clamp.
Vector forward(const FittedMap& map, const Vector& y, std::size_t* clamped = nullptr);
/// y = T^{-1}(z), solved sequentially.
Vector inverse(const FittedMap& map, const Vector& z);
/// Components before observed.size() are fixed to `observed`; the rest follow the inverse recursion.
Vector conditional_inverse(const FittedMap& map, const Vector& z, const Vector& observed);
/// Row-wise inverse, parallel across rows.
Matrix inverse_rows(const FittedMap& map, const Matrix& z);
Matrix conditional_inverse_rows(const FittedMap& map, const Matrix& z, const Vector& observed);

/// Sum over components of the log predictive t density.
double log_density(const FittedMap& map, const Vector& y);
/// Per-component terms of log_density.
Vector log_density_terms(const FittedMap& map, const Vector& y);

/// Integrated log-likelihood with f and d integrated out,
///   sum_i [ -1/2 log|G_i| + alpha_i log beta_i - alpha~_i log beta~_i + lgamma(alpha~_i) - lgamma(alpha_i) ].
/// The omitted theta-free constant is integrated_loglik_constant(n, N).
double integrated_loglik(const Matrix& y, const HyperParams& hp, const Ordering& ordering,
                         const BaseCoefficients& base);

/// -(n N / 2) log(2 pi); add to integrated_loglik to get log p(Y).
double integrated_loglik_constant(std::size_t n, std::size_t components);

/// Integrated log-likelihood term of one fitted component.
double component_loglik(const ComponentFit& c, std::size_t n);

}  // namespace shrinktm
