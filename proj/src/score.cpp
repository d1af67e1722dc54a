// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/score.hpp"

#include <chrono>
#include <cmath>
#include <random>


namespace shrinktm {

double log_score(const FittedMap& map, const Matrix& test) {
  if (test.rows() < 1) throw DataError("test set is empty");
  if (static_cast<std::size_t>(test.cols()) != map.size()) throw DataError("test width does not match the map");
  std::vector<double> values(static_cast<std::size_t>(test.rows()));
  for (Eigen::Index j = 0; j < test.rows(); ++j)
    values[static_cast<std::size_t>(j)] = log_density(map, test.row(j).transpose());
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(test.rows());
}

double log_score(const GaussianField& field, const Matrix& test) {
  if (test.rows() < 1) throw DataError("test set is empty");
  return field.log_density_rows(test).mean();
}

Matrix reference_draws(std::size_t n, std::size_t width, std::uint64_t seed) {
  Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (std::size_t j = 0; j < n; ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j), 0x5a17u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < width; ++i) z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = normal(rng);
  }
  return z;
}

double conditional_rmse(const FittedMap& map, const Vector& truth, std::size_t k, std::size_t draws,
                        std::uint64_t seed) {
  const std::size_t big_n = map.size();
  if (static_cast<std::size_t>(truth.size()) != big_n) throw DataError("field length does not match the map");
  if (k >= big_n) throw DataError("observed prefix must leave at least one held-out location");
  if (draws < 1) throw DataError("need at least one conditional draw");
  const Matrix samples = conditional_inverse_rows(map, reference_draws(draws, big_n, seed),
                                                  truth.head(static_cast<Eigen::Index>(k)));
  const Vector mean = samples.colwise().mean().transpose();
  const auto held = static_cast<Eigen::Index>(big_n - k);
  return std::sqrt((mean.tail(held) - truth.tail(held)).squaredNorm() / static_cast<double>(held));
}

double conditional_rmse(const GaussianField& field, const Vector& truth, std::size_t k) {
  const auto big_n = truth.size();
  if (static_cast<Eigen::Index>(k) >= big_n) throw DataError("observed prefix must leave at least one held-out location");
  const Vector mean = field.conditional_mean(truth.head(static_cast<Eigen::Index>(k)));
  const auto held = big_n - static_cast<Eigen::Index>(k);
  return std::sqrt((mean - truth.tail(held)).squaredNorm() / static_cast<double>(held));
}

std::string to_string(Method m) {
  switch (m) {
    case Method::shrinktm: return "shrinktm";
    case Method::simpletm: return "simpletm";
    case Method::matcov: return "matcov";
  }
  return "shrinktm";
}

Method method_from_string(const std::string& name) {
  if (name == "shrinktm") return Method::shrinktm;
  if (name == "simpletm") return Method::simpletm;
  if (name == "matcov") return Method::matcov;
  throw DataError("unknown method '" + name + "'");
}

std::uint64_t replication_seed(std::uint64_t seed, int replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication)};
  std::mt19937_64 rng(seq);
  return rng();
}

std::vector<ResultRow> compare(const ExperimentConfig& config, const std::function<void(const ResultRow&)>& progress) {
  if (config.replications < 1) throw DataError("need at least one replication");
  if (config.test_size < 1) throw DataError("need at least one test field");
  const FieldSimulator sim(config.design);
  const Locations ordered = ordered_locations(sim.locations(), sim.ordering());
  const std::uint64_t test_stream = 1ull << 40;
  std::vector<ResultRow> rows;
  auto emit = [&](ResultRow row) {
    rows.push_back(row);
    if (progress) progress(rows.back());
  };

  for (int rep = 0; rep < config.replications; ++rep) {
    const std::uint64_t seed = replication_seed(config.seed, rep);
    const Matrix test = sim.draw(config.test_size, seed, test_stream);
    for (std::size_t n : config.ns) {
      if (n < 1) throw DataError("training size must be at least 1");
      const Matrix train = sim.draw(n, seed, 0);
      for (Method method : config.methods) {
        const auto start = std::chrono::steady_clock::now();
        double score = 0.0, rmse = 0.0;
        if (method == Method::matcov) {
          const MatCovFit mc = matcov_mle(train, ordered, config.matcov);
          const GaussianField field(mc.family, ordered);
          score = log_score(field, test);
          if (config.rmse_observed > 0) rmse = conditional_rmse(field, test.row(0).transpose(), config.rmse_observed);
        } else {
          OptimizerConfig oc = config.optimizer;
          oc.init = method == Method::shrinktm ? config.shrink_init : config.simple_init;
          const MapFit mf = fit_ordered(train, sim.locations(), sim.ordering(), oc);
          score = log_score(mf.map, test);
          if (config.rmse_observed > 0)
            rmse = conditional_rmse(mf.map, test.row(0).transpose(), config.rmse_observed, config.rmse_draws, seed);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit({to_string(method), n, rep, "logscore", score, seed, secs});
        emit({to_string(method), n, rep, "logscore_per_location", score / static_cast<double>(sim.ordering().size()),
              seed, secs});
        if (config.rmse_observed > 0) emit({to_string(method), n, rep, "rmse", rmse, seed, secs});
      }
    }
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "method,n,replication,metric,value,seed,seconds\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.method << ',' << r.n << ',' << r.replication << ',' << r.metric << ',' << r.value << ',' << r.seed << ','
        << r.seconds << '\n';
}

}  // namespace shrinktm
