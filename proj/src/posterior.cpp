// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shrinktm/distributions.hpp"
#include "shrinktm/parallel.hpp"

namespace shrinktm {

Predictive FittedMap::predict(std::size_t i, const Eigen::Ref<const Vector>& y) const {
  const ComponentFit& c = components[i];
  Predictive out;
  out.dof = 2.0 * c.alpha_tilde;
  double mean = 0.0;
  for (std::size_t k = 0; k < c.cond.size(); ++k) mean += c.xi(static_cast<Eigen::Index>(k)) * y(c.cond[k]);

  double v = 0.0;
  const int width = c.kernel.width();
  if (width > 0) {
    Eigen::RowVectorXd x(width);
    for (int k = 0; k < width; ++k) x(k) = y(c.inputs[static_cast<std::size_t>(k)]);
    v = c.kernel.value(x, x) / c.tau2;
    const Eigen::Index n = c.design.rows();
    if (n > 0) {
      Vector kstar(n);
      for (Eigen::Index j = 0; j < n; ++j) kstar(j) = c.kernel.value(x, c.design.row(j)) / c.tau2;
      mean += kstar.dot(c.weights);
      const Vector w = c.g_factor.triangularView<Eigen::Lower>().solve(kstar);
      v -= w.squaredNorm();
    }
    v = std::max(v, 0.0);
  }
  out.mean = mean;
  out.scale = std::sqrt(c.d2() * (v + 1.0));
  return out;
}

FittedMap fit_components(const Matrix& y, const HyperParams& hp, const Ordering& ordering,
                         const BaseCoefficients& base) {
  const std::size_t big_n = ordering.size();
  if (static_cast<std::size_t>(y.cols()) != big_n) throw DataError("data width does not match the ordering");
  if (base.size() != big_n) throw DataError("base coefficients do not match the ordering");
  if (!y.allFinite()) throw DataError("data contain non-finite values");

  const PriorMoments moments = prior_moments(hp, base, ordering);
  FittedMap map;
  map.hp = hp;
  map.ordering = ordering;
  map.replicates = static_cast<std::size_t>(y.rows());
  map.mprime = moments.mprime;
  map.components.resize(big_n);
  const Eigen::Index n = y.rows();

  parallel_for(big_n, [&](std::size_t i) {
    ComponentFit& c = map.components[i];
    c.cond = base.cond[i];
    c.xi = base.xi[i].size() == static_cast<Eigen::Index>(c.cond.size()) ? base.xi[i] : Vector::Zero(0);
    c.tau2 = base.tau2[i];
    c.kernel = component_kernel(hp, moments, i);
    const int width = c.kernel.width();
    c.inputs.assign(ordering.neighbors[i].begin(), ordering.neighbors[i].begin() + width);
    c.design.resize(n, width);
    for (int k = 0; k < width; ++k) c.design.col(k) = y.col(c.inputs[static_cast<std::size_t>(k)]);

    Vector r = y.col(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < c.cond.size(); ++k) r -= c.xi(static_cast<Eigen::Index>(k)) * y.col(c.cond[k]);

    Matrix g = c.kernel.covariance(c.design, c.design) / c.tau2;
    g.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(g);
    if (n > 0 && llt.info() != Eigen::Success)
      throw NumericError("G matrix of component " + std::to_string(i) + " is not positive definite");
    c.g_factor = n > 0 ? Matrix(llt.matrixL()) : Matrix(0, 0);
    c.weights = n > 0 ? Vector(llt.solve(r)) : Vector(0);

    c.alpha = moments.alpha;
    c.beta = moments.beta[i];
    c.alpha_tilde = c.alpha + 0.5 * static_cast<double>(n);
    c.beta_tilde = c.beta + 0.5 * r.dot(c.weights);
    if (!std::isfinite(c.beta_tilde) || !(c.beta_tilde > 0.0))
      throw NumericError("non-finite posterior scale in component " + std::to_string(i));
  });
  return map;
}

Vector forward(const FittedMap& map, const Vector& y, std::size_t* clamped) {
  if (static_cast<std::size_t>(y.size()) != map.size()) throw DataError("field length does not match the map");
  Vector z(y.size());
  std::vector<char> hit(map.size(), 0);
  parallel_for(map.size(), [&](std::size_t i) {
    const Predictive p = map.predict(i, y);
    bool c = false;
    z(static_cast<Eigen::Index>(i)) = t_to_normal((y(static_cast<Eigen::Index>(i)) - p.mean) / p.scale, p.dof, &c);
    hit[i] = c ? 1 : 0;
  });
  if (clamped) *clamped = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  return z;
}

Vector conditional_inverse(const FittedMap& map, const Vector& z, const Vector& observed) {
  const auto big_n = static_cast<Eigen::Index>(map.size());
  if (z.size() != big_n) throw DataError("reference vector length does not match the map");
  if (observed.size() > big_n) throw DataError("more observed values than map components");
  Vector y = Vector::Zero(big_n);
  y.head(observed.size()) = observed;
  for (Eigen::Index i = observed.size(); i < big_n; ++i) {
    const Predictive p = map.predict(static_cast<std::size_t>(i), y);
    y(i) = p.mean + p.scale * normal_to_t(z(i), p.dof);
  }
  return y;
}

Vector inverse(const FittedMap& map, const Vector& z) { return conditional_inverse(map, z, Vector(0)); }

Matrix conditional_inverse_rows(const FittedMap& map, const Matrix& z, const Vector& observed) {
  Matrix out(z.rows(), z.cols());
  parallel_for(static_cast<std::size_t>(z.rows()), [&](std::size_t r) {
    out.row(static_cast<Eigen::Index>(r)) =
        conditional_inverse(map, z.row(static_cast<Eigen::Index>(r)).transpose(), observed).transpose();
  });
  return out;
}

Matrix inverse_rows(const FittedMap& map, const Matrix& z) { return conditional_inverse_rows(map, z, Vector(0)); }

Vector log_density_terms(const FittedMap& map, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != map.size()) throw DataError("field length does not match the map");
  Vector terms(y.size());
  parallel_for(map.size(), [&](std::size_t i) {
    const Predictive p = map.predict(i, y);
    const double w = (y(static_cast<Eigen::Index>(i)) - p.mean) / p.scale;
    terms(static_cast<Eigen::Index>(i)) = student_t_log_pdf(w, p.dof) - std::log(p.scale);
  });
  return terms;
}

double log_density(const FittedMap& map, const Vector& y) { return log_density_terms(map, y).sum(); }

double component_loglik(const ComponentFit& c, std::size_t n) {
  double logdet = 0.0;
  if (n > 0) logdet = 2.0 * c.g_factor.diagonal().array().log().sum();
  return -0.5 * logdet + c.alpha * std::log(c.beta) - c.alpha_tilde * std::log(c.beta_tilde) +
         std::lgamma(c.alpha_tilde) - std::lgamma(c.alpha);
}

double integrated_loglik(const Matrix& y, const HyperParams& hp, const Ordering& ordering,
                         const BaseCoefficients& base) {
  if (y.rows() < 1) throw DataError("integrated likelihood needs at least one replicate");
  const FittedMap map = fit_components(y, hp, ordering, base);
  double total = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double term = component_loglik(map.components[i], map.replicates);
    if (!std::isfinite(term)) throw NumericError("non-finite likelihood term in component " + std::to_string(i));
    total += term;
  }
  return total;
}

double integrated_loglik_constant(std::size_t n, std::size_t components) {
  return -0.5 * static_cast<double>(n) * static_cast<double>(components) * std::log(2.0 * std::numbers::pi);
}

}  // namespace shrinktm
