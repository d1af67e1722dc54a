// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/vecchia.hpp"

#include "shrinktm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace shrinktm {

VecchiaStencil::VecchiaStencil(const Locations& locs, const Ordering& ordering, int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("conditioning set size must be at least 1");
  if (ordering.size() != locs.size()) throw DataError("ordering does not match locations");
  const std::size_t n = ordering.size();
  cond_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = ordering.neighbors[i];
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(m), nb.size());
    cond_[i].assign(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(k));
  }

  auto point = [&](std::size_t pos) { return locs.coords.row(static_cast<Eigen::Index>(ordering.perm[pos])); };

  std::vector<std::vector<double>> raw(n);
  std::vector<double> all;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = cond_[i];
    const int p = static_cast<int>(g.size());
    auto& d = raw[i];
    d.resize(static_cast<std::size_t>((p + 1) * (p + 2) / 2));
    std::size_t k = 0;
    for (int r = 0; r <= p; ++r) {
      const std::size_t pr = r == p ? i : static_cast<std::size_t>(g[static_cast<std::size_t>(r)]);
      for (int c = 0; c <= r; ++c) {
        const std::size_t pc = c == p ? i : static_cast<std::size_t>(g[static_cast<std::size_t>(c)]);
        d[k++] = (point(pr) - point(pc)).norm();
      }
    }
    all.insert(all.end(), d.begin(), d.end());
  }
  std::sort(all.begin(), all.end());
  for (double v : all)
    if (distances_.empty() || v - distances_.back() > 1e-12 * std::max(1.0, v)) distances_.push_back(v);

  ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids_[i].resize(raw[i].size());
    for (std::size_t k = 0; k < raw[i].size(); ++k) {
      const double v = raw[i][k];
      auto it = std::lower_bound(distances_.begin(), distances_.end(), v - 1e-12 * std::max(1.0, v));
      ids_[i][k] = static_cast<int>(it - distances_.begin());
    }
  }
}

int VecchiaStencil::id(std::size_t i, int r, int c) const {
  if (c > r) std::swap(r, c);
  return ids_[i][static_cast<std::size_t>(r * (r + 1) / 2 + c)];
}

VecchiaStencil::Table VecchiaStencil::tabulate(const BaseFamily& family) const {
  family.validate();
  Table t;
  t.free_parameters = family.free_parameters();
  t.values.reserve(distances_.size());
  for (double d : distances_) t.values.push_back(covariance_with_derivatives(family, d));
  return t;
}

VecchiaStencil::Local VecchiaStencil::solve(std::size_t i, const Table& table) const {
  const int p = static_cast<int>(cond_[i].size());
  Local out;
  const double c = table.values[static_cast<std::size_t>(id(i, p, p))].value;
  if (p == 0) {
    out.tau2 = c;
    return out;
  }
  Matrix a(p, p);
  Vector b(p);
  for (int r = 0; r < p; ++r) {
    for (int s = 0; s <= r; ++s) a(r, s) = a(s, r) = table.values[static_cast<std::size_t>(id(i, r, s))].value;
    b(r) = table.values[static_cast<std::size_t>(id(i, p, r))].value;
  }
  out.chol.compute(a);
  if (out.chol.info() != Eigen::Success)
    throw NumericError("conditioning covariance of component " + std::to_string(i) + " is numerically singular");
  out.xi = out.chol.solve(b);
  out.tau2 = c - b.dot(out.xi);
  if (!(out.tau2 > 0.0) || !std::isfinite(out.tau2))
    throw NumericError("conditioning covariance of component " + std::to_string(i) + " is numerically singular");
  return out;
}

Vector VecchiaStencil::adjoint(std::size_t i, const Table& table, const Local& local, const Vector& d_xi,
                               double d_tau2) const {
  const int np = table.free_parameters;
  const int p = static_cast<int>(cond_[i].size());
  Vector grad = Vector::Zero(np);
  auto deriv = [&](int distance_id, int k) {
    const auto& v = table.values[static_cast<std::size_t>(distance_id)];
    return k == 0 ? v.d_log_variance : (k == 1 ? v.d_log_range : v.d_log_smoothness);
  };
  // dxi = A^{-1}(db - dA xi), dtau2 = dc - 2 db'xi + xi' dA xi
  const Vector mu = p > 0 ? Vector(local.chol.solve(d_xi)) : Vector();
  for (int k = 0; k < np; ++k) {
    double g = d_tau2 * deriv(id(i, p, p), k);
    for (int r = 0; r < p; ++r) {
      const double db = deriv(id(i, p, r), k);
      g += db * (mu(r) - 2.0 * d_tau2 * local.xi(r));
      double da_xi = 0.0;
      for (int s = 0; s < p; ++s) da_xi += deriv(id(i, r, s), k) * local.xi(s);
      g += da_xi * (d_tau2 * local.xi(r) - mu(r));
    }
    grad(k) = g;
  }
  return grad;
}

BaseCoefficients vecchia_coefficients(const BaseFamily& family, const Locations& locs, const Ordering& ordering,
                                      int m) {
  const VecchiaStencil stencil(locs, ordering, m);
  const auto table = stencil.tabulate(family);
  BaseCoefficients out;
  const std::size_t n = stencil.size();
  out.cond.resize(n);
  out.xi.resize(n);
  out.tau2.resize(n);
  parallel_for(n, [&](std::size_t i) {
    auto local = stencil.solve(i, table);
    out.cond[i] = stencil.conditioning(i);
    out.xi[i] = std::move(local.xi);
    out.tau2[i] = local.tau2;
  });
  return out;
}

Vector vecchia_log_density(const BaseCoefficients& base, const Matrix& y) {
  if (static_cast<std::size_t>(y.cols()) != base.size()) throw DataError("data width does not match the model");
  Vector out = Vector::Zero(y.rows());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& g = base.cond[i];
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      double mean = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) mean += base.xi[i](static_cast<Eigen::Index>(k)) * y(j, g[k]);
      const double r = y(j, static_cast<Eigen::Index>(i)) - mean;
      out(j) += -0.5 * (log2pi + std::log(base.tau2[i]) + r * r / base.tau2[i]);
    }
  }
  return out;
}

}  // namespace shrinktm
