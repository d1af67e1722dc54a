// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "shrinktm/covariance.hpp"
#include "shrinktm/geometry.hpp"
#include "shrinktm/posterior.hpp"
#include "shrinktm/score.hpp"

namespace shrinktm {

/// A trained model as stored on disk: either a transport map or a MatCov Gaussian field.
struct Model {
  Method method = Method::shrinktm;
  Locations locs;               // file order
  Ordering ordering;
  std::optional<FittedMap> map; // shrinktm / simpletm
  BaseFamily family;            // matcov
  double objective = 0.0;       // integrated or Gaussian log-likelihood at the fit
  double color_limit = 0.0;     // symmetric heatmap limit taken from the training data
  std::size_t replicates = 0;
};

/// Binary model file, little-endian:
///
///   "STMMODEL" u32 version=1 u8 method
///   u64 N  u64 n  u32 m  u32 m'  u32 dim
///   f64 objective  f64 color_limit
///   u64 len, JSON text   (hyperparameters or MatCov family)
///   N x [u32 len, id bytes, dim x f64 coords]      locations, file order
///   N x u64 perm, N x f64 scales, u32 max_neighbors,
///   N x [u32 k, k x i32]                           neighbor lists
///   map methods only, per component:
///     u32 p, p x i32 cond, p x f64 xi, f64 tau2
///     u32 p', p' x i32 inputs, p' x f64 qdiag, f64 sigma0^2, f64 sigma^2, f64 gamma, u8 shape
///     n*p' x f64 design (column-major), n(n+1)/2 x f64 Cholesky factor of G (packed lower, by row),
///     n x f64 weights, f64 alpha, beta, alpha~, beta~
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);
void save_model_file(const std::string& path, const Model& model);
Model load_model_file(const std::string& path);

}  // namespace shrinktm
