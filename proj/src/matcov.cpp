// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/matcov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "shrinktm/parallel.hpp"
#include "shrinktm/vecchia.hpp"

namespace shrinktm {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Dense pairwise distances with deduplication, reused across likelihood evaluations.
class DenseDistances {
 public:
  explicit DenseDistances(const Locations& locs) : n_(static_cast<Eigen::Index>(locs.size())) {
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(n_ * (n_ + 1) / 2));
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) all.push_back((locs.coords.row(i) - locs.coords.row(j)).norm());
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted)
      if (unique_.empty() || v - unique_.back() > 1e-12 * std::max(1.0, v)) unique_.push_back(v);
    ids_.resize(all.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
      const double v = all[k];
      ids_[k] = static_cast<int>(std::lower_bound(unique_.begin(), unique_.end(), v - 1e-12 * std::max(1.0, v)) -
                                 unique_.begin());
    }
  }

  std::vector<CovarianceValue> tabulate(const BaseFamily& f) const {
    std::vector<CovarianceValue> t;
    t.reserve(unique_.size());
    for (double d : unique_) t.push_back(covariance_with_derivatives(f, d));
    return t;
  }

  template <class Get>
  Matrix assemble(const std::vector<CovarianceValue>& table, Get get) const {
    Matrix out(n_, n_);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n_; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) out(i, j) = out(j, i) = get(table[static_cast<std::size_t>(ids_[k++])]);
    return out;
  }

 private:
  Eigen::Index n_;
  std::vector<double> unique_;
  std::vector<int> ids_;
};

Evaluation dense_loglik(const DenseDistances& dist, const BaseFamily& f, const Matrix& y, bool grad) {
  const auto table = dist.tabulate(f);
  const Matrix sigma = dist.assemble(table, [](const CovarianceValue& v) { return v.value; });
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericError("covariance matrix is not positive definite");
  const double n = static_cast<double>(y.rows());
  const double logdet = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  const Matrix a = llt.solve(y.transpose());  // N x n
  Evaluation e;
  e.value = -0.5 * n * (logdet + static_cast<double>(y.cols()) * kLog2Pi) - 0.5 * y.transpose().cwiseProduct(a).sum();
  if (!grad) return e;
  Matrix inv = Matrix::Identity(sigma.rows(), sigma.cols());
  llt.solveInPlace(inv);
  const Matrix m = a * a.transpose() - n * inv;
  const int np = f.free_parameters();
  e.gradient.resize(np);
  for (int k = 0; k < np; ++k) {
    const Matrix d = dist.assemble(table, [k](const CovarianceValue& v) {
      return k == 0 ? v.d_log_variance : (k == 1 ? v.d_log_range : v.d_log_smoothness);
    });
    e.gradient(k) = 0.5 * m.cwiseProduct(d).sum();
  }
  return e;
}

Evaluation vecchia_loglik(const VecchiaStencil& stencil, const BaseFamily& f, const Matrix& y_ordered, bool grad) {
  const auto table = stencil.tabulate(f);
  const std::size_t big_n = stencil.size();
  const double n = static_cast<double>(y_ordered.rows());
  std::vector<double> values(big_n);
  std::vector<Vector> grads(big_n);
  parallel_for(big_n, [&](std::size_t i) {
    const auto local = stencil.solve(i, table);
    const auto& g = stencil.conditioning(i);
    Vector r = y_ordered.col(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < g.size(); ++k) r -= local.xi(static_cast<Eigen::Index>(k)) * y_ordered.col(g[k]);
    const double ss = r.squaredNorm();
    values[i] = -0.5 * (n * (kLog2Pi + std::log(local.tau2)) + ss / local.tau2);
    if (!grad) return;
    Vector d_xi(static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k)
      d_xi(static_cast<Eigen::Index>(k)) = y_ordered.col(g[k]).dot(r) / local.tau2;
    const double d_tau2 = -0.5 * n / local.tau2 + 0.5 * ss / (local.tau2 * local.tau2);
    grads[i] = stencil.adjoint(i, table, local, d_xi, d_tau2);
  });
  Evaluation e;
  for (double v : values) e.value += v;
  if (grad) {
    e.gradient = Vector::Zero(f.free_parameters());
    for (const auto& g : grads) e.gradient += g;
  }
  return e;
}

}  // namespace

GaussianField::GaussianField(const BaseFamily& family, const Locations& locs)
    : family_(family), sigma_(shrinktm::covariance(family, locs.coords, locs.coords)), chol_(sigma_) {
  if (chol_.info() != Eigen::Success) throw NumericError("covariance matrix is not positive definite");
}

Vector GaussianField::log_density_rows(const Matrix& y) const {
  if (y.cols() != sigma_.rows()) throw DataError("field length does not match the locations");
  const double logdet = 2.0 * Matrix(chol_.matrixL()).diagonal().array().log().sum();
  const Matrix w = chol_.matrixL().solve(y.transpose());
  Vector out(y.rows());
  for (Eigen::Index j = 0; j < y.rows(); ++j)
    out(j) = -0.5 * (static_cast<double>(y.cols()) * kLog2Pi + logdet + w.col(j).squaredNorm());
  return out;
}

namespace {

// big_n x n standard-normal columns, column j from the stream (seed, j).
Matrix normal_columns(Eigen::Index big_n, std::size_t n, std::uint64_t seed) {
  Matrix z(big_n, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < big_n; ++i) z(i, static_cast<Eigen::Index>(j)) = normal(rng);
  }
  return z;
}

}  // namespace

Matrix GaussianField::sample(std::size_t n, std::uint64_t seed) const {
  return (Matrix(chol_.matrixL()) * normal_columns(sigma_.rows(), n, seed)).transpose();
}

Matrix GaussianField::conditional_sample(const Vector& observed, std::size_t n, std::uint64_t seed) const {
  const Eigen::Index k = observed.size(), big_n = sigma_.rows();
  if (k > big_n) throw DataError("more observed values than locations");
  if (k == 0) return sample(n, seed);
  Matrix out(static_cast<Eigen::Index>(n), big_n);
  out.leftCols(k) = observed.transpose().replicate(static_cast<Eigen::Index>(n), 1);
  if (k == big_n) return out;
  const Eigen::LLT<Matrix> obs(sigma_.topLeftCorner(k, k));
  if (obs.info() != Eigen::Success) throw NumericError("observed covariance is not positive definite");
  const Matrix cross = sigma_.bottomLeftCorner(big_n - k, k);
  const Vector mean = cross * obs.solve(observed);
  const Matrix cond = sigma_.bottomRightCorner(big_n - k, big_n - k) - cross * obs.solve(cross.transpose());
  const Eigen::LLT<Matrix> chol(cond);
  if (chol.info() != Eigen::Success) throw NumericError("conditional covariance is not positive definite");
  const Matrix draws = Matrix(chol.matrixL()) * normal_columns(big_n - k, n, seed);
  out.rightCols(big_n - k) = (draws.colwise() + mean).transpose();
  return out;
}

Vector GaussianField::conditional_mean(const Vector& observed) const {
  const Eigen::Index k = observed.size(), big_n = sigma_.rows();
  if (k > big_n) throw DataError("more observed values than locations");
  if (k == 0) return Vector::Zero(big_n);
  const Eigen::LLT<Matrix> obs(sigma_.topLeftCorner(k, k));
  if (obs.info() != Eigen::Success) throw NumericError("observed covariance is not positive definite");
  return sigma_.bottomLeftCorner(big_n - k, k) * obs.solve(observed);
}

double gaussian_loglik(const BaseFamily& family, const Matrix& y, const Locations& locs, std::size_t exact_limit,
                       int vecchia_m) {
  if (static_cast<std::size_t>(y.cols()) != locs.size()) throw DataError("data width does not match locations");
  if (locs.size() <= exact_limit) return dense_loglik(DenseDistances(locs), family, y, false).value;
  const Ordering ord = maximin_order(locs, std::nullopt, std::max(vecchia_m, 1));
  return vecchia_loglik(VecchiaStencil(locs, ord, vecchia_m), family, to_maximin(y, ord), false).value;
}

MatCovFit matcov_mle(const Matrix& y, const Locations& locs, const MatCovConfig& config) {
  if (y.rows() < 1) throw DataError("maximum likelihood needs at least one replicate");
  if (static_cast<std::size_t>(y.cols()) != locs.size()) throw DataError("data width does not match locations");
  if (!y.allFinite()) throw DataError("data contain non-finite values");
  const double mean_square = y.squaredNorm() / static_cast<double>(y.size());
  if (!(mean_square > 0.0)) throw DataError("degenerate data");

  double diameter = 0.0;
  for (Eigen::Index i = 0; i < locs.coords.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) diameter = std::max(diameter, (locs.coords.row(i) - locs.coords.row(j)).norm());
  if (!(diameter > 0.0)) diameter = 1.0;

  BaseFamily init = config.kind == FamilyKind::exponential
                        ? BaseFamily::exponential(mean_square, 0.1 * diameter)
                        : BaseFamily::matern(mean_square, 0.1 * diameter, config.init_smoothness);
  if (config.kind == FamilyKind::matern) init.learn_smoothness = config.learn_smoothness;
  if (config.init) {
    init = *config.init;
    init.validate();
  }

  ObjectiveFn fn;
  std::optional<DenseDistances> dense;
  std::optional<VecchiaStencil> stencil;
  Matrix ordered;
  if (locs.size() <= config.exact_limit) {
    dense.emplace(locs);
    fn = [&](const std::vector<double>& theta, int) {
      BaseFamily f = init;
      f.assign(theta);
      return dense_loglik(*dense, f, y, true);
    };
  } else {
    const Ordering ord = maximin_order(locs, std::nullopt, std::max(config.vecchia_m, 1));
    stencil.emplace(locs, ord, config.vecchia_m);
    ordered = to_maximin(y, ord);
    fn = [&](const std::vector<double>& theta, int) {
      BaseFamily f = init;
      f.assign(theta);
      return vecchia_loglik(*stencil, f, ordered, true);
    };
  }

  AdamResult res = adam_maximize(fn, init.to_vector(), config.adam, init.parameter_names());
  MatCovFit out;
  out.family = init;
  out.family.assign(res.theta);
  out.loglik = res.value;
  out.trace = std::move(res.trace);
  return out;
}

}  // namespace shrinktm
