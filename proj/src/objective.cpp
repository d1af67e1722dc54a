// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "shrinktm/parallel.hpp"

namespace shrinktm {

namespace {

// Partial derivatives of one component's log-likelihood term.
struct ComponentTerm {
  double value = 0.0;
  Vector d_residual;
  double d_tau2 = 0.0;
  double d_log_cd = 0.0;
  double d_sigma1 = 0.0;
  double d_sigma2 = 0.0;
  double d_q = 0.0;
  double d_gamma = 0.0;
  double d_sigma0 = 0.0;
};

ComponentTerm component_term(const Vector& r, const Matrix& x, const ComponentKernel& kernel, double tau2,
                             double alpha, double log_cd, double theta_q, double log_scale, bool want_grad) {
  const Eigen::Index n = r.size();
  const int width = kernel.width();
  const double nn = static_cast<double>(n);
  ComponentTerm t;

  // C and, for the gradient, its derivatives with respect to the kernel parameters.
  Matrix lin = Matrix::Zero(n, n), rho = Matrix::Zero(n, n);
  Matrix lin_q, rho_q, rho_g;
  if (want_grad) {
    lin_q = rho_q = rho_g = Matrix::Zero(n, n);
  }
  if (width > 0) {
    const double rate = std::exp(theta_q);
    const double g2 = kernel.gamma * kernel.gamma;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index l = 0; l <= j; ++l) {
        double a = 0.0, h2 = 0.0, aq = 0.0, h2q = 0.0;
        for (int k = 0; k < width; ++k) {
          const double qk = kernel.qdiag(k);
          const double prod = x(j, k) * x(l, k);
          const double d = x(j, k) - x(l, k);
          a += qk * prod;
          h2 += qk * d * d;
          if (want_grad) {
            const double dq = -2.0 * rate * (k + 1) * qk;
            aq += dq * prod;
            h2q += dq * d * d;
          }
        }
        const double s = h2 / g2;
        double rv, drds;
        if (kernel.shape == KernelShape::squared_exponential) {
          rv = std::exp(-0.5 * s);
          drds = -0.5 * rv;
        } else {
          const double tt = std::sqrt(3.0 * s);
          const double e = std::exp(-tt);
          rv = (1.0 + tt) * e;
          drds = -1.5 * e;
        }
        lin(j, l) = lin(l, j) = a;
        rho(j, l) = rho(l, j) = rv;
        if (want_grad) {
          lin_q(j, l) = lin_q(l, j) = aq;
          rho_q(j, l) = rho_q(l, j) = drds * h2q / g2;
          rho_g(j, l) = rho_g(l, j) = drds * (-2.0 * s);
        }
      }
    }
  }
  Matrix c = Matrix::Zero(n, n);
  if (width > 0) c = kernel.sigma0_sq * lin + kernel.sigma_sq * rho;
  Matrix g = c / tau2;
  g.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw NumericError("G matrix is not positive definite");
  const Vector u = llt.solve(r);
  const double beta = (alpha - 1.0) * tau2;
  const double alpha_t = alpha + 0.5 * nn;
  const double beta_t = beta + 0.5 * r.dot(u);
  const Matrix lfac = llt.matrixL();
  const double logdet = 2.0 * lfac.diagonal().array().log().sum();
  t.value = -0.5 * logdet + alpha * std::log(beta) - alpha_t * std::log(beta_t) + std::lgamma(alpha_t) -
            std::lgamma(alpha);
  if (!want_grad) return t;

  const double coef = alpha_t / beta_t;
  t.d_residual = -coef * u;

  Matrix w = Matrix::Identity(n, n);
  llt.solveInPlace(w);
  // derivative of the term for dG = M / tau2
  auto through_g = [&](const Matrix& m) {
    return (-0.5 * w.cwiseProduct(m).sum() + 0.5 * coef * u.dot(m * u)) / tau2;
  };
  const Matrix k = c / tau2;
  t.d_tau2 = 0.5 * w.cwiseProduct(k).sum() / tau2 + alpha / tau2 -
             coef * ((alpha - 1.0) + 0.5 * u.dot(k * u) / tau2);

  const double dalpha = -2.0 * std::exp(-2.0 * log_cd);
  t.d_log_cd = dalpha * (std::log(beta) + alpha * tau2 / beta - std::log(beta_t) - coef * tau2 +
                         boost::math::digamma(alpha_t) - boost::math::digamma(alpha));

  if (width > 0) {
    const Matrix srho = kernel.sigma_sq * rho;
    t.d_sigma1 = through_g(srho);
    t.d_sigma2 = log_scale * t.d_sigma1;
    t.d_sigma0 = through_g(kernel.sigma0_sq * lin);
    t.d_gamma = through_g(kernel.sigma_sq * rho_g);
    t.d_q = through_g(kernel.sigma0_sq * lin_q + kernel.sigma_sq * rho_q);
  }
  return t;
}

}  // namespace

MapObjective::MapObjective(Matrix y, const Locations& locs, Ordering ordering, int m)
    : y_(std::move(y)), ordering_(std::move(ordering)), stencil_(locs, ordering_, m) {
  if (y_.rows() < 1) throw DataError("training data need at least one replicate");
  if (static_cast<std::size_t>(y_.cols()) != ordering_.size()) throw DataError("data width does not match locations");
  if (!y_.allFinite()) throw DataError("data contain non-finite values");
}

BaseCoefficients MapObjective::base(const HyperParams& hp) const {
  if (hp.kind == MapKind::simple) return simple_base(hp, ordering_);
  const auto table = stencil_.tabulate(hp.base);
  BaseCoefficients out;
  const std::size_t n = ordering_.size();
  out.cond.resize(n);
  out.xi.resize(n);
  out.tau2.resize(n);
  parallel_for(n, [&](std::size_t i) {
    auto local = stencil_.solve(i, table);
    out.cond[i] = stencil_.conditioning(i);
    out.xi[i] = std::move(local.xi);
    out.tau2[i] = local.tau2;
  });
  return out;
}

MapObjective::Result MapObjective::evaluate(const HyperParams& hp, bool gradient, std::optional<int> mprime,
                                            std::span<const std::size_t> subset) const {
  const std::size_t big_n = ordering_.size();
  const int mp = mprime ? std::clamp(*mprime, 0, hp.m_max) : hp.mprime();
  const bool shrink = hp.kind == MapKind::shrink;
  const int nbase = shrink ? hp.base.free_parameters() : 0;
  const std::size_t npar = hp.to_vector().size();
  const double alpha = hp.alpha();

  std::vector<std::size_t> all;
  if (subset.empty()) {
    all.resize(big_n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    subset = all;
  }

  VecchiaStencil::Table table;
  if (shrink) table = stencil_.tabulate(hp.base);

  std::vector<double> values(subset.size(), 0.0);
  std::vector<Vector> grads(subset.size());
  const Vector qall = relevance_weights(hp.theta_q, mp);

  parallel_for(subset.size(), [&](std::size_t s) {
    const std::size_t i = subset[s];
    const double scale = ordering_.scales[i];

    VecchiaStencil::Local local;
    double tau2;
    const std::vector<int>* cond = nullptr;
    if (shrink) {
      local = stencil_.solve(i, table);
      tau2 = local.tau2;
      cond = &stencil_.conditioning(i);
    } else {
      tau2 = std::exp(hp.theta_d1 + hp.theta_d2 * std::log(scale));
    }

    Vector r = y_.col(static_cast<Eigen::Index>(i));
    if (cond)
      for (std::size_t k = 0; k < cond->size(); ++k) r -= local.xi(static_cast<Eigen::Index>(k)) * y_.col((*cond)[k]);

    ComponentKernel kernel;
    const int width = std::min<int>(mp, static_cast<int>(ordering_.neighbors[i].size()));
    kernel.qdiag = qall.head(width).array().square();
    kernel.sigma0_sq = hp.sigma0_sq();
    kernel.sigma_sq = hp.sigma_sq(scale);
    kernel.gamma = hp.gamma();
    kernel.shape = hp.shape;
    Matrix x(y_.rows(), width);
    for (int k = 0; k < width; ++k) x.col(k) = y_.col(ordering_.neighbors[i][static_cast<std::size_t>(k)]);

    ComponentTerm t;
    try {
      t = component_term(r, x, kernel, tau2, alpha, hp.log_cd, hp.theta_q, std::log(scale), gradient);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (component " + std::to_string(i) + ")");
    }
    if (!std::isfinite(t.value)) throw NumericError("non-finite likelihood term in component " + std::to_string(i));
    values[s] = t.value;
    if (!gradient) return;

    Vector g = Vector::Zero(static_cast<Eigen::Index>(npar));
    if (shrink) {
      Vector d_xi = Vector::Zero(static_cast<Eigen::Index>(cond->size()));
      for (std::size_t k = 0; k < cond->size(); ++k)
        d_xi(static_cast<Eigen::Index>(k)) = -y_.col((*cond)[k]).dot(t.d_residual);
      g.head(nbase) = stencil_.adjoint(i, table, local, d_xi, t.d_tau2);
    }
    g(nbase + 0) = t.d_log_cd;
    g(nbase + 1) = t.d_sigma1;
    g(nbase + 2) = t.d_sigma2;
    g(nbase + 3) = t.d_q;
    g(nbase + 4) = t.d_gamma;
    g(nbase + 5) = t.d_sigma0;
    if (!shrink) {
      g(nbase + 6) = t.d_tau2 * tau2;
      g(nbase + 7) = t.d_tau2 * tau2 * std::log(scale);
    }
    grads[s] = std::move(g);
  });

  const double factor = static_cast<double>(big_n) / static_cast<double>(subset.size());
  Result res;
  for (double v : values) res.value += v;
  res.value *= factor;
  if (gradient) {
    res.gradient = Vector::Zero(static_cast<Eigen::Index>(npar));
    for (const auto& g : grads) res.gradient += g;
    res.gradient *= factor;
  }
  return res;
}

Vector MapObjective::finite_difference_gradient(const HyperParams& hp, double rel_step) const {
  const int mp = hp.mprime();
  const std::vector<double> theta = hp.to_vector();
  Vector grad(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(theta[j]));
    HyperParams up = hp, dn = hp;
    auto tu = theta, td = theta;
    tu[j] += h;
    td[j] -= h;
    up.assign(tu);
    dn.assign(td);
    grad(static_cast<Eigen::Index>(j)) =
        (evaluate(up, false, mp).value - evaluate(dn, false, mp).value) / (2.0 * h);
  }
  return grad;
}

}  // namespace shrinktm
