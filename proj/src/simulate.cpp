// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/simulate.hpp"

#include <cmath>
#include <random>

#include "shrinktm/parallel.hpp"

namespace shrinktm {

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::lr: return "lr";
    case DesignKind::nr: return "nr";
    case DesignKind::gaussian: return "gaussian";
  }
  return "lr";
}

DesignKind design_kind_from_string(const std::string& name) {
  if (name == "lr") return DesignKind::lr;
  if (name == "nr") return DesignKind::nr;
  if (name == "gaussian") return DesignKind::gaussian;
  throw DataError("unknown design '" + name + "'");
}

FieldSimulator::FieldSimulator(const SimDesign& design)
    : FieldSimulator(design, Locations::grid(design.nx, design.ny)) {}

FieldSimulator::FieldSimulator(const SimDesign& design, const Locations& locs) : design_(design), locs_(locs) {
  if (design.nx < 1 || design.ny < 1 || design.nx * design.ny < 2) throw DataError("grid needs at least two points");
  build();
}

void FieldSimulator::build() {
  ordering_ = maximin_order(locs_, std::nullopt, 30);
  const Locations ordered = ordered_locations(locs_, ordering_);
  const Matrix sigma = covariance(design_.covariance, ordered.coords, ordered.coords);
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericError("design covariance is not positive definite");
  factor_ = llt.matrixL();

  // Full-conditioning coefficients b_i = L_{1:i-1}^{-T} L_{i,1:i-1}^T; only the two
  // nearest earlier neighbors are needed for the sine term.
  const auto big_n = static_cast<Eigen::Index>(ordering_.size());
  b_ = Eigen::MatrixX2d::Zero(big_n, 2);
  parallel_for(static_cast<std::size_t>(big_n), [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    if (i == 0) return;
    const Vector row = factor_.row(i).head(i).transpose();
    const Vector b = factor_.topLeftCorner(i, i).triangularView<Eigen::Lower>().transpose().solve(row);
    const auto& nb = ordering_.neighbors[s];
    for (int k = 0; k < 2 && k < static_cast<int>(nb.size()); ++k) b_(i, k) = b(nb[static_cast<std::size_t>(k)]);
  });
}

double FieldSimulator::nearest_coefficient(std::size_t i, int k) const {
  return b_(static_cast<Eigen::Index>(i), k);
}

Matrix FieldSimulator::draw(std::size_t n, std::uint64_t seed, std::uint64_t first_stream) const {
  const auto big_n = static_cast<Eigen::Index>(ordering_.size());
  const double amp = design_.kind == DesignKind::nr ? design_.amplitude : 0.0;
  Matrix out(static_cast<Eigen::Index>(n), big_n);
  parallel_for(n, [&](std::size_t j) {
    const std::uint64_t stream = first_stream + j;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    // w = L^{-1} y, built alongside y so that b_i' y_{1:i-1} = L_{i,1:i-1} w_{1:i-1}
    Vector y(big_n), w(big_n);
    for (Eigen::Index i = 0; i < big_n; ++i) {
      const double eps = normal(rng);
      const double linear = i > 0 ? factor_.row(i).head(i).dot(w.head(i)) : 0.0;
      double nonlinear = 0.0;
      if (i > 0) {
        const auto& nb = ordering_.neighbors[static_cast<std::size_t>(i)];
        double arg = b_(i, 0) * y(nb[0]);
        if (nb.size() > 1) arg += b_(i, 1) * y(nb[1]);
        nonlinear = amp * std::sin(design_.frequency * arg);
      }
      y(i) = linear + nonlinear + factor_(i, i) * eps;
      w(i) = (y(i) - linear) / factor_(i, i);
    }
    out.row(static_cast<Eigen::Index>(j)) = y.transpose();
  });
  return out;
}

Simulation simulate(const SimDesign& design, std::size_t n) {
  const FieldSimulator sim(design);
  return {sim.locations(), sim.ordering(), sim.draw(n, design.seed)};
}

}  // namespace shrinktm
