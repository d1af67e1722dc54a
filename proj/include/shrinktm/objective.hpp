// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/mapkernel.hpp"
#include "shrinktm/vecchia.hpp"

namespace shrinktm {

/// Integrated log-likelihood as a function of the unconstrained hyperparameter
/// vector, with its analytic gradient. Geometry (ordering, conditioning sets and
/// distance table) is built once; each evaluation recomputes the base
/// coefficients and every component from scratch.
class MapObjective {
 public:
  /// `y` is n x N in maximin order, n >= 1.
  MapObjective(Matrix y, const Locations& locs, Ordering ordering, int m = 30);

  struct Result {
    double value = 0.0;
    Vector gradient;  // empty unless requested
  };

  /// `mprime` overrides the sparsity level implied by hp.theta_q; the gradient
  /// always treats m' as fixed. A non-empty `subset` evaluates only those
  /// components and rescales by N / |subset|.
  Result evaluate(const HyperParams& hp, bool gradient = true, std::optional<int> mprime = std::nullopt,
                  std::span<const std::size_t> subset = {}) const;

  /// Central finite differences of evaluate() with m' held at its value at hp.
  /// Step for coordinate j is rel_step * max(1, |theta_j|).
  Vector finite_difference_gradient(const HyperParams& hp, double rel_step = 1e-4) const;

  /// Base coefficients for hp (Vecchia for shrink, scale law for simple).
  BaseCoefficients base(const HyperParams& hp) const;

  const Matrix& data() const { return y_; }
  const Ordering& ordering() const { return ordering_; }
  const VecchiaStencil& stencil() const { return stencil_; }

 private:
  Matrix y_;
  Ordering ordering_;
  VecchiaStencil stencil_;
};

}  // namespace shrinktm
