// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors
//
// Reference computations shared by the unit tests and the acceptance run. They
// avoid the library's fitting code paths on purpose.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shrinktm/geometry.hpp"
#include "shrinktm/mapkernel.hpp"
#include "shrinktm/vecchia.hpp"

namespace testing {

/// Sum over components of the multivariate-t log-density of the residual
/// r_i = y_i - Y_cond xi_i ~ t_{2a}(0, (b_i / a)(K_i + I)), with K_i built entry by
/// entry for the squared-exponential kernel and inverted densely.
inline double multivariate_t_oracle(const shrinktm::Matrix& y, const shrinktm::HyperParams& hp,
                                    const shrinktm::Ordering& ord, const shrinktm::BaseCoefficients& base) {
  using shrinktm::Matrix;
  using shrinktm::Vector;
  const Eigen::Index n = y.rows();
  const double a = 2.0 + std::exp(-2.0 * hp.log_cd);
  const double s0 = std::exp(hp.theta_sigma0), g = std::exp(hp.theta_gamma);
  const int mp = hp.mprime();
  double total = 0.0;
  for (std::size_t i = 0; i < ord.size(); ++i) {
    const double tau2 = base.tau2[i];
    const double b = (a - 1.0) * tau2;
    const double s2 = std::exp(hp.theta_sigma1) * std::pow(ord.scales[i], hp.theta_sigma2);
    const int w = std::min<int>(mp, static_cast<int>(ord.neighbors[i].size()));
    Matrix k(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) {
        double lin = 0.0, h2 = 0.0;
        for (int j = 0; j < w; ++j) {
          const double q2 = std::exp(-2.0 * std::exp(hp.theta_q) * (j + 1));
          const int col = ord.neighbors[i][static_cast<std::size_t>(j)];
          lin += q2 * y(r, col) * y(c, col);
          h2 += q2 * (y(r, col) - y(c, col)) * (y(r, col) - y(c, col));
        }
        k(r, c) = w == 0 ? 0.0 : (s0 * lin + s2 * std::exp(-0.5 * h2 / (g * g))) / tau2;
      }
    Vector resid = y.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < base.cond[i].size(); ++j)
      resid -= base.xi[i](static_cast<Eigen::Index>(j)) * y.col(base.cond[i][j]);
    const Matrix shape = (b / a) * (k + Matrix::Identity(n, n));
    const double nu = 2.0 * a, dn = static_cast<double>(n);
    const double quad = resid.dot(shape.inverse() * resid);
    total += std::lgamma(0.5 * (nu + dn)) - std::lgamma(0.5 * nu) - 0.5 * dn * std::log(nu * std::numbers::pi) -
             0.5 * std::log(shape.determinant()) - 0.5 * (nu + dn) * std::log1p(quad / nu);
  }
  return total;
}

/// Dense zero-mean Gaussian log-density.
inline double dense_gaussian_log_density(const shrinktm::Matrix& sigma, const shrinktm::Vector& y) {
  const Eigen::LLT<shrinktm::Matrix> llt(sigma);
  const shrinktm::Matrix l = llt.matrixL();
  const shrinktm::Vector w = l.triangularView<Eigen::Lower>().solve(y);
  return -0.5 * (static_cast<double>(y.size()) * std::log(2 * std::numbers::pi) + 2 * l.diagonal().array().log().sum() +
                 w.squaredNorm());
}

/// Least-squares slope of log scale against log (1-based) position over [lo, hi].
inline double decay_slope(const shrinktm::Ordering& ord, std::size_t lo, std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double x = std::log(static_cast<double>(i)), y = std::log(ord.scales[i - 1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing
