// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "shrinktm/common.hpp"
#include "shrinktm/covariance.hpp"
#include "shrinktm/geometry.hpp"

namespace shrinktm {

/// lr: Gaussian field with the design covariance, generated as a linear triangular map.
/// nr: the same map plus amplitude * sin(frequency * (b_i1 y_c1 + b_i2 y_c2)).
/// gaussian: alias of lr for an arbitrary base family.
enum class DesignKind { lr, nr, gaussian };

std::string to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& name);

struct SimDesign {
  DesignKind kind = DesignKind::lr;
  int nx = 30;
  int ny = 30;
  BaseFamily covariance = BaseFamily::exponential(1.0, 0.3);
  double amplitude = 2.0;
  double frequency = 4.0;
  std::uint64_t seed = 1;
};

/// Precomputed full-conditioning triangular map of a design. Replicate j of a
/// draw with seed s always comes from the RNG stream (s, first_stream + j),
/// independent of thread count and of how many replicates are requested.
class FieldSimulator {
 public:
  explicit FieldSimulator(const SimDesign& design);
  FieldSimulator(const SimDesign& design, const Locations& locs);

  /// n x N draws in maximin order.
  Matrix draw(std::size_t n, std::uint64_t seed, std::uint64_t first_stream = 0) const;

  const Locations& locations() const { return locs_; }
  const Ordering& ordering() const { return ordering_; }
  const SimDesign& design() const { return design_; }
  /// Coefficient of the k-th nearest earlier neighbor (k = 0, 1) in the full conditional mean of y_i.
  double nearest_coefficient(std::size_t i, int k) const;

 private:
  void build();

  SimDesign design_;
  Locations locs_;
  Ordering ordering_;
  Matrix factor_;       // lower Cholesky factor of the maximin-ordered covariance
  Eigen::MatrixX2d b_;  // coefficients of c_i(1), c_i(2)
};

struct Simulation {
  Locations locs;
  Ordering ordering;
  Matrix data;  // n x N, maximin order
};

Simulation simulate(const SimDesign& design, std::size_t n);

}  // namespace shrinktm
