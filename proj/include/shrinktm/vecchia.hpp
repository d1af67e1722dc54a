// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/covariance.hpp"
#include "shrinktm/geometry.hpp"

namespace shrinktm {

/// Per-component linear conditional model y_i | y_cond ~ N(xi' y_cond, tau2).
/// Indices in `cond` are maximin positions.
struct BaseCoefficients {
  std::vector<std::vector<int>> cond;
  std::vector<Vector> xi;
  std::vector<double> tau2;

  std::size_t size() const { return tau2.size(); }
};

/// Vecchia regression weights and residual variances from exact submatrix solves.
BaseCoefficients vecchia_coefficients(const BaseFamily& family, const Locations& locs, const Ordering& ordering,
                                      int m);

/// Geometry of all conditioning systems, with distances deduplicated so that the
/// covariance function is evaluated once per distinct distance. On regular grids
/// the number of distinct distances is tiny compared with N m^2.
class VecchiaStencil {
 public:
  VecchiaStencil(const Locations& locs, const Ordering& ordering, int m);

  /// Covariance values (and derivatives) at every distinct distance.
  struct Table {
    std::vector<CovarianceValue> values;
    int free_parameters = 0;
  };
  Table tabulate(const BaseFamily& family) const;

  /// Solved conditioning system of one component.
  struct Local {
    Eigen::LLT<Matrix> chol;
    Vector xi;
    double tau2 = 0.0;
  };
  /// Throws NumericError if the conditioning covariance is numerically singular.
  Local solve(std::size_t i, const Table& table) const;

  /// Gradient with respect to the free base parameters of a scalar objective F(xi_i, tau2_i)
  /// given dF/dxi and dF/dtau2.
  Vector adjoint(std::size_t i, const Table& table, const Local& local, const Vector& d_xi, double d_tau2) const;

  const std::vector<int>& conditioning(std::size_t i) const { return cond_[i]; }
  std::size_t size() const { return cond_.size(); }
  int m() const { return m_; }
  std::size_t distinct_distances() const { return distances_.size(); }

 private:
  // Distance id for entry (r, c) of the (p+1)x(p+1) system; row/col p is the component itself.
  int id(std::size_t i, int r, int c) const;

  int m_;
  std::vector<std::vector<int>> cond_;
  std::vector<std::vector<int>> ids_;
  std::vector<double> distances_;
};

/// Vecchia-approximated Gaussian log-density of each row of Y (maximin order).
Vector vecchia_log_density(const BaseCoefficients& base, const Matrix& y);

}  // namespace shrinktm
