// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shrinktm/common.hpp"

namespace shrinktm {

/// Spatial locations, one row per point. ids follow file order.
struct Locations {
  Matrix coords;  // N x dim, dim in {1, 2, 3}
  std::vector<std::string> ids;

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }

  /// Builds locations with ids "0", "1", ...
  static Locations from_coords(Matrix coords);
  /// Regular nx x ny grid on [0,1]^2, x varying fastest. nx or ny may be 1.
  static Locations grid(int nx, int ny);
  /// Equally spaced points on [0,1].
  static Locations line(int n);
};

using DistanceFn = std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&,
                                        const Eigen::Ref<const Eigen::RowVectorXd>&)>;

double euclidean_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                          const Eigen::Ref<const Eigen::RowVectorXd>& b);

/// Maximin ordering of a set of locations.
///
/// Indices in `scales` and `neighbors` are positions in the ordering (0-based);
/// `perm[i]` is the file index of the i-th ordered location. `neighbors[i]` lists
/// up to `max_neighbors` earlier positions sorted by ascending distance, ties
/// broken by the lower position.
struct Ordering {
  std::vector<std::size_t> perm;
  std::vector<std::size_t> rank;  // inverse of perm
  std::vector<double> scales;
  std::vector<std::vector<int>> neighbors;
  int max_neighbors = 30;

  std::size_t size() const { return perm.size(); }
};

/// Greedy exact maximin ordering, O(N^2).
///
/// The first point defaults to the location nearest the coordinate centroid.
/// scales[0] is set to the diameter of the point set; for i >= 1, scales[i] is
/// the distance to the nearest earlier point. Throws DataError on duplicate points.
Ordering maximin_order(const Locations& locs, std::optional<std::size_t> first = std::nullopt,
                       int max_neighbors = 30, const DistanceFn& distance = euclidean_distance);

/// g_m(i): the first min(m, i) entries of each neighbor list.
std::vector<std::vector<int>> neighbor_sets(const Ordering& ordering, int m);

/// Reorders the columns of an n x N matrix given in file order into maximin order.
Matrix to_maximin(const Matrix& file_order, const Ordering& ordering);
/// Inverse of to_maximin.
Matrix to_file_order(const Matrix& maximin, const Ordering& ordering);

/// Locations permuted into maximin order.
Locations ordered_locations(const Locations& locs, const Ordering& ordering);

}  // namespace shrinktm
