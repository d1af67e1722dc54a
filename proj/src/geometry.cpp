// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shrinktm {

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Locations Locations::from_coords(Matrix coords) {
  Locations locs;
  locs.ids.reserve(static_cast<std::size_t>(coords.rows()));
  for (Eigen::Index i = 0; i < coords.rows(); ++i) locs.ids.push_back(std::to_string(i));
  locs.coords = std::move(coords);
  return locs;
}

Locations Locations::grid(int nx, int ny) {
  if (nx < 1 || ny < 1) throw DataError("grid dimensions must be positive");
  Matrix coords(static_cast<Eigen::Index>(nx) * ny, 2);
  auto axis = [](int k, int count) { return count == 1 ? 0.0 : static_cast<double>(k) / (count - 1); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      coords(j * nx + i, 0) = axis(i, nx);
      coords(j * nx + i, 1) = axis(j, ny);
    }
  return from_coords(std::move(coords));
}

Locations Locations::line(int n) {
  if (n < 1) throw DataError("line needs at least one point");
  Matrix coords(n, 1);
  for (int i = 0; i < n; ++i) coords(i, 0) = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
  return from_coords(std::move(coords));
}

double euclidean_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                          const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  return (a - b).norm();
}

Ordering maximin_order(const Locations& locs, std::optional<std::size_t> first, int max_neighbors,
                       const DistanceFn& distance) {
  const std::size_t n = locs.size();
  if (n == 0) throw DataError("maximin ordering needs at least one location");
  if (locs.dim() < 1 || locs.dim() > 3) throw DataError("locations must have dimension 1, 2 or 3");
  if (max_neighbors < 1) throw DataError("max_neighbors must be at least 1");
  if (first && *first >= n) throw DataError("first index out of range");

  const auto& x = locs.coords;
  auto dist = [&](std::size_t a, std::size_t b) {
    return distance(x.row(static_cast<Eigen::Index>(a)), x.row(static_cast<Eigen::Index>(b)));
  };

  std::size_t start = 0;
  if (first) {
    start = *first;
  } else {
    const Eigen::RowVectorXd centroid = x.colwise().mean();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = distance(x.row(static_cast<Eigen::Index>(i)), centroid);
      if (d < best) {
        best = d;
        start = i;
      }
    }
  }

  Ordering ord;
  ord.max_neighbors = max_neighbors;
  ord.perm.reserve(n);
  ord.scales.reserve(n);

  double diameter = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) diameter = std::max(diameter, dist(i, j));
  if (n > 1 && diameter <= 0.0) throw DataError("degenerate locations");

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  std::size_t next = start;
  for (std::size_t step = 0; step < n; ++step) {
    if (step > 0) {
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && min_dist[i] > best) {
          best = min_dist[i];
          next = i;
        }
      }
      if (best <= 0.0) throw DataError("degenerate locations");
      ord.scales.push_back(best);
    } else {
      ord.scales.push_back(n > 1 ? diameter : 1.0);
    }
    taken[next] = 1;
    ord.perm.push_back(next);
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) min_dist[i] = std::min(min_dist[i], dist(i, next));
  }

  ord.rank.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) ord.rank[ord.perm[i]] = i;

  ord.neighbors.resize(n);
  std::vector<std::pair<double, int>> cand;
  for (std::size_t i = 1; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < i; ++j) cand.emplace_back(dist(ord.perm[i], ord.perm[j]), static_cast<int>(j));
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(max_neighbors), i);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    auto& nb = ord.neighbors[i];
    nb.reserve(k);
    for (std::size_t t = 0; t < k; ++t) nb.push_back(cand[t].second);
  }
  return ord;
}

std::vector<std::vector<int>> neighbor_sets(const Ordering& ordering, int m) {
  if (m < 1 || m > ordering.max_neighbors)
    throw std::invalid_argument("neighbor set size must be in [1, max_neighbors]");
  std::vector<std::vector<int>> sets(ordering.size());
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    const auto& nb = ordering.neighbors[i];
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(m), nb.size());
    sets[i].assign(nb.begin(), nb.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return sets;
}

Matrix to_maximin(const Matrix& file_order, const Ordering& ordering) {
  if (static_cast<std::size_t>(file_order.cols()) != ordering.size())
    throw DataError("column count does not match the number of locations");
  Matrix out(file_order.rows(), file_order.cols());
  for (std::size_t i = 0; i < ordering.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = file_order.col(static_cast<Eigen::Index>(ordering.perm[i]));
  return out;
}

Matrix to_file_order(const Matrix& maximin, const Ordering& ordering) {
  if (static_cast<std::size_t>(maximin.cols()) != ordering.size())
    throw DataError("column count does not match the number of locations");
  Matrix out(maximin.rows(), maximin.cols());
  for (std::size_t i = 0; i < ordering.size(); ++i)
    out.col(static_cast<Eigen::Index>(ordering.perm[i])) = maximin.col(static_cast<Eigen::Index>(i));
  return out;
}

Locations ordered_locations(const Locations& locs, const Ordering& ordering) {
  Locations out;
  out.coords.resize(locs.coords.rows(), locs.coords.cols());
  out.ids.reserve(locs.size());
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    out.coords.row(static_cast<Eigen::Index>(i)) = locs.coords.row(static_cast<Eigen::Index>(ordering.perm[i]));
    out.ids.push_back(locs.ids.empty() ? std::to_string(ordering.perm[i]) : locs.ids[ordering.perm[i]]);
  }
  return out;
}

}  // namespace shrinktm
