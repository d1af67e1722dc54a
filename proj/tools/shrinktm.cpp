// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors
//
// Command-line front end: simulate, fit, sample, score, experiment.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "shrinktm/matcov.hpp"
#include "shrinktm/model_io.hpp"
#include "shrinktm/optimize.hpp"
#include "shrinktm/score.hpp"
#include "shrinktm/simulate.hpp"
#include "shrinktm/svg.hpp"
#include "shrinktm/table_io.hpp"

namespace fs = std::filesystem;
using namespace shrinktm;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kNumericError = 3;

const std::vector<std::string> kCommands = {"simulate", "fit", "sample", "score", "experiment"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

// Reads `key=value` lines (blank lines and # comments ignored) and turns them into
// `--key=value` arguments placed ahead of the command-line flags, so flags win.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::FileError("cannot open config file '" + path + "'");
  std::vector<std::string> root, sub;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line " + std::to_string(number) + " has no '='");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    (key == "threads" ? root : sub).push_back("--" + key + "=" + value);
  }
  auto cmd = std::find_if(args.begin() + 1, args.end(),
                          [](const std::string& a) { return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end(); });
  if (cmd != args.end()) cmd = args.insert(cmd + 1, sub.begin(), sub.end()) - 1;
  args.insert(args.begin() + 1, root.begin(), root.end());
  return args;
}

std::pair<int, int> parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected NXxNY, e.g. 30x30");
  try {
    const int nx = std::stoi(spec.substr(0, x)), ny = std::stoi(spec.substr(x + 1));
    if (nx < 1 || ny < 1 || nx * ny < 2) throw CLI::ValidationError("--grid", "grid must have at least 2 points");
    return {nx, ny};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--grid", "expected NXxNY, e.g. 30x30");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  body(out);
}

// Design flags shared by simulate and experiment.
struct DesignFlags {
  std::string kind = "lr";
  std::string grid = "30x30";
  double amplitude = 2.0;
  double frequency = 4.0;
  std::string family = "exponential";
  double variance = 1.0;
  double range = 0.3;
  double smoothness = 0.5;

  void add(CLI::App* app) {
    app->add_option("--design", kind, "lr, nr or gaussian")->check(CLI::IsMember({"lr", "nr", "gaussian"}))->capture_default_str();
    app->add_option("--grid", grid, "regular grid NXxNY on [0,1]^2")->capture_default_str();
    app->add_option("--amplitude", amplitude, "nr: amplitude of the sine term")->capture_default_str();
    app->add_option("--frequency", frequency, "nr: frequency of the sine term")->capture_default_str();
    app->add_option("--family", family, "covariance family: exponential or matern")
        ->check(CLI::IsMember({"exponential", "matern"}))
        ->capture_default_str();
    app->add_option("--variance", variance, "covariance variance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--range", range, "covariance range")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--smoothness", smoothness, "matern smoothness")->check(CLI::PositiveNumber)->capture_default_str();
  }

  SimDesign build(std::uint64_t seed) const {
    SimDesign d;
    d.kind = design_kind_from_string(kind);
    std::tie(d.nx, d.ny) = parse_grid(grid);
    d.amplitude = amplitude;
    d.frequency = frequency;
    d.covariance = family == "matern" ? BaseFamily::matern(variance, range, smoothness)
                                      : BaseFamily::exponential(variance, range);
    d.seed = seed;
    return d;
  }
};

// Optimizer flags shared by fit and experiment.
struct FitFlags {
  int iterations = AdamConfig{}.iterations;
  double learning_rate = AdamConfig{}.learning_rate;
  std::string gradient = "analytic";
  double subsample = 1.0;
  int m = 30;
  std::string shape = "se";
  std::string base = "matern";

  void add(CLI::App* app) {
    app->add_option("--iters", iterations, "Adam iterations")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--lr", learning_rate, "initial Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--gradient", gradient, "analytic or fd")->check(CLI::IsMember({"analytic", "fd"}))->capture_default_str();
    app->add_option("--subsample", subsample, "fraction of components per gradient step")
        ->check(CLI::Range(1e-6, 1.0))
        ->capture_default_str();
    app->add_option("--m", m, "Vecchia conditioning-set size of the base")->check(CLI::Range(1, 30))->capture_default_str();
    app->add_option("--kernel", shape, "nonlinear correlation: se or matern32")
        ->check(CLI::IsMember({"se", "matern32"}))
        ->capture_default_str();
    app->add_option("--base", base, "base covariance family: matern or exponential")
        ->check(CLI::IsMember({"matern", "exponential"}))
        ->capture_default_str();
  }

  OptimizerConfig optimizer(std::uint64_t seed) const {
    OptimizerConfig oc;
    oc.adam.iterations = iterations;
    oc.adam.learning_rate = learning_rate;
    oc.gradient = gradient == "fd" ? GradientMode::finite_difference : GradientMode::analytic;
    oc.subsample = subsample;
    oc.seed = seed;
    return oc;
  }

  HyperParams init(MapKind kind) const {
    HyperParams hp = default_hyperparams(kind);
    hp.m = m;
    hp.shape = shape == "matern32" ? KernelShape::matern32 : KernelShape::squared_exponential;
    if (base == "exponential") hp.base = BaseFamily::exponential(hp.base.variance(), hp.base.range());
    return hp;
  }

  MatCovConfig matcov() const {
    MatCovConfig mc;
    if (base == "exponential") mc.kind = FamilyKind::exponential;
    return mc;
  }
};

void print_parameters(const std::vector<std::string>& names, const std::vector<double>& values) {
  std::cout.precision(10);
  for (std::size_t k = 0; k < names.size(); ++k) std::cout << names[k] << " = " << values[k] << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Bayesian transport maps shrunk toward a parametric Gaussian base", "shrinktm"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--config", config_path, "file of key=value lines giving flag defaults");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate fields on a regular grid");
  DesignFlags sim_design;
  sim_design.add(sim);
  std::size_t sim_n = 10;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  sim->add_option("--n", sim_n, "number of replicates")->capture_default_str();
  sim->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output directory for locations.csv and data.csv")->capture_default_str();

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a model to replicates");
  std::string fit_data, fit_locs, fit_method = "shrinktm", fit_out = "model.stm", fit_trace, fit_init;
  std::uint64_t fit_seed = 1;
  FitFlags fit_flags;
  fitc->add_option("--data", fit_data, "data CSV (rows = replicates, header = location ids)")->required();
  fitc->add_option("--locs", fit_locs, "locations CSV (id,x[,y[,z]])")->required();
  fitc->add_option("--method", fit_method, "shrinktm, simpletm or matcov")
      ->check(CLI::IsMember({"shrinktm", "simpletm", "matcov"}))
      ->capture_default_str();
  fitc->add_option("--seed", fit_seed, "random seed")->capture_default_str();
  fitc->add_option("--out", fit_out, "model file")->capture_default_str();
  fitc->add_option("--trace", fit_trace, "optional optimizer trace CSV");
  fitc->add_option("--init-from", fit_init, "start from the parameters of a saved model");
  fit_flags.add(fitc);

  // sample
  auto* samp = app.add_subcommand("sample", "draw fields from a fitted model");
  std::string samp_model, samp_out = "samples.csv", samp_condition;
  std::size_t samp_n = 5, samp_k = 100;
  std::uint64_t samp_seed = 2;
  bool samp_svg = false;
  samp->add_option("--model", samp_model, "model file")->required();
  samp->add_option("--n", samp_n, "number of samples")->capture_default_str();
  samp->add_option("--seed", samp_seed, "random seed")->capture_default_str();
  samp->add_option("--out", samp_out, "samples CSV")->capture_default_str();
  auto* cond_opt = samp->add_option("--condition-on", samp_condition, "CSV with one field to condition on");
  samp->add_option("--observed-k", samp_k, "number of leading maximin-ordered locations held fixed")
      ->capture_default_str()
      ->needs(cond_opt);
  samp->add_flag("--svg", samp_svg, "also write one SVG heatmap per sample next to --out");

  // score
  auto* scorec = app.add_subcommand("score", "log-score held-out fields and optional conditional RMSE");
  std::string score_model, score_data;
  std::size_t score_k = 0, score_draws = 50;
  std::uint64_t score_seed = 1;
  scorec->add_option("--model", score_model, "model file")->required();
  scorec->add_option("--data", score_data, "test data CSV")->required();
  scorec->add_option("--rmse-k", score_k, "also report conditional RMSE given this many ordered locations (0 = off)");
  scorec->add_option("--draws", score_draws, "conditional draws per field for the RMSE")->capture_default_str();
  scorec->add_option("--seed", score_seed, "random seed")->capture_default_str();

  // experiment
  auto* expc = app.add_subcommand("experiment", "compare methods over training sizes and replications");
  DesignFlags exp_design;
  exp_design.add(expc);
  FitFlags exp_flags;
  exp_flags.add(expc);
  std::string exp_methods = "shrinktm,simpletm,matcov", exp_ns = "1,2,5,10", exp_out = "results.csv";
  int exp_reps = 10;
  std::uint64_t exp_seed = 1;
  std::size_t exp_test = 20, exp_k = 0, exp_draws = 50;
  expc->add_option("--methods", exp_methods, "comma-separated methods")->capture_default_str();
  expc->add_option("--ns", exp_ns, "comma-separated training sizes")->capture_default_str();
  expc->add_option("--reps", exp_reps, "replications per training size")->check(CLI::PositiveNumber)->capture_default_str();
  expc->add_option("--seed", exp_seed, "random seed")->capture_default_str();
  expc->add_option("--test-size", exp_test, "held-out fields per replication")->capture_default_str();
  expc->add_option("--rmse-k", exp_k, "also record conditional RMSE given this many ordered locations (0 = off)");
  expc->add_option("--draws", exp_draws, "conditional draws for the RMSE")->capture_default_str();
  expc->add_option("--out", exp_out, "results CSV")->capture_default_str();

  try {
    std::vector<std::string> args = apply_config(std::vector<std::string>(argv, argv + argc));
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }
  set_thread_count(threads);

  if (*sim) {
    const SimDesign design = sim_design.build(sim_seed);
    const FieldSimulator simulator(design);
    const Matrix y = to_file_order(simulator.draw(sim_n, sim_seed), simulator.ordering());
    const fs::path dir(sim_out);
    write_file(dir / "locations.csv", [&](std::ostream& o) { write_locations(o, simulator.locations()); });
    write_file(dir / "data.csv", [&](std::ostream& o) { write_data(o, y, simulator.locations()); });
    std::cout << "wrote " << y.rows() << " x " << y.cols() << " fields to " << (dir / "data.csv").string() << '\n';
    return 0;
  }

  if (*fitc) {
    const Locations locs = read_locations_file(fit_locs);
    const Matrix y = read_data_file(fit_data, locs);
    if (y.rows() < 1) throw DataError("data file has no replicates");
    std::optional<Model> previous;
    if (!fit_init.empty()) previous = load_model_file(fit_init);
    Model model;
    model.method = method_from_string(fit_method);
    model.locs = locs;
    model.color_limit = color_limit(y);
    model.replicates = static_cast<std::size_t>(y.rows());
    FitTrace trace;
    if (model.method == Method::matcov) {
      MatCovConfig mc = fit_flags.matcov();
      mc.adam.iterations = fit_flags.iterations;
      if (fitc->count("--lr")) mc.adam.learning_rate = fit_flags.learning_rate;
      if (previous) {
        if (previous->method != Method::matcov) throw DataError("--init-from model is not a matcov model");
        mc.init = previous->family;
      }
      model.ordering = maximin_order(locs);
      const MatCovFit f = matcov_mle(y, locs, mc);
      model.family = f.family;
      model.objective = f.loglik;
      trace = f.trace;
      print_parameters({"variance", "range", "smoothness"},
                       {f.family.variance(), f.family.range(), f.family.smoothness()});
    } else {
      OptimizerConfig oc = fit_flags.optimizer(fit_seed);
      const MapKind kind = model.method == Method::shrinktm ? MapKind::shrink : MapKind::simple;
      oc.init = fit_flags.init(kind);
      if (previous) {
        if (!previous->map || previous->map->hp.kind != kind) throw DataError("--init-from model has a different method");
        oc.init = previous->map->hp;
      }
      MapFit f = fit(y, locs, oc);
      model.ordering = f.map.ordering;
      model.objective = f.objective;
      print_parameters(f.hp.parameter_names(), f.hp.to_vector());
      std::cout << "mprime = " << f.map.mprime << '\n';
      model.map = std::move(f.map);
      trace = std::move(f.trace);
    }
    std::cout << "objective = " << model.objective << '\n';
    for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
    save_model_file(fit_out, model);
    if (!fit_trace.empty()) write_file(fit_trace, [&](std::ostream& o) { trace.write_csv(o); });
    return 0;
  }

  if (*samp) {
    const Model model = load_model_file(samp_model);
    const std::size_t big_n = model.locs.size();
    std::optional<Vector> observed;
    if (!samp_condition.empty()) {
      const Matrix field = read_data_file(samp_condition, model.locs);
      if (field.rows() != 1) throw DataError("--condition-on must hold exactly one field");
      if (samp_k > big_n) throw DataError("--observed-k exceeds the number of locations");
      observed = to_maximin(field, model.ordering).row(0).head(static_cast<Eigen::Index>(samp_k)).transpose();
    }
    Matrix draws;
    if (model.method == Method::matcov) {
      const GaussianField field(model.family, ordered_locations(model.locs, model.ordering));
      draws = observed ? field.conditional_sample(*observed, samp_n, samp_seed) : field.sample(samp_n, samp_seed);
    } else {
      const Matrix z = reference_draws(samp_n, big_n, samp_seed);
      draws = observed ? conditional_inverse_rows(*model.map, z, *observed) : inverse_rows(*model.map, z);
    }
    const Matrix out = to_file_order(draws, model.ordering);
    write_file(samp_out, [&](std::ostream& o) { write_data(o, out, model.locs); });
    if (samp_svg) {
      const fs::path base(samp_out);
      for (Eigen::Index j = 0; j < out.rows(); ++j) {
        const fs::path svg = base.parent_path() / (base.stem().string() + "_" + std::to_string(j) + ".svg");
        write_text(svg, heatmap_svg(model.locs, out.row(j).transpose(), model.color_limit,
                                    to_string(model.method) + " sample " + std::to_string(j)));
      }
    }
    std::cout << "wrote " << out.rows() << " samples to " << samp_out << '\n';
    return 0;
  }

  if (*scorec) {
    const Model model = load_model_file(score_model);
    const Matrix test = to_maximin(read_data_file(score_data, model.locs), model.ordering);
    if (test.rows() < 1) throw DataError("test data has no fields");
    const double big_n = static_cast<double>(model.locs.size());
    std::cout.precision(10);
    if (model.method == Method::matcov) {
      const GaussianField field(model.family, ordered_locations(model.locs, model.ordering));
      const double s = log_score(field, test);
      std::cout << "logscore = " << s << "\nlogscore_per_location = " << s / big_n << '\n';
      if (score_k > 0) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < test.rows(); ++j) total += conditional_rmse(field, test.row(j).transpose(), score_k);
        std::cout << "rmse = " << total / static_cast<double>(test.rows()) << '\n';
      }
    } else {
      const double s = log_score(*model.map, test);
      std::cout << "logscore = " << s << "\nlogscore_per_location = " << s / big_n << '\n';
      if (score_k > 0) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < test.rows(); ++j)
          total += conditional_rmse(*model.map, test.row(j).transpose(), score_k, score_draws, score_seed);
        std::cout << "rmse = " << total / static_cast<double>(test.rows()) << '\n';
      }
    }
    return 0;
  }

  if (*expc) {
    ExperimentConfig ec;
    ec.design = exp_design.build(exp_seed);
    ec.methods.clear();
    for (const auto& m : split(exp_methods, ',')) ec.methods.push_back(method_from_string(m));
    ec.ns.clear();
    for (const auto& n : split(exp_ns, ',')) {
      try {
        ec.ns.push_back(std::stoul(n));
      } catch (const std::logic_error&) {
        throw CLI::ValidationError("--ns", "'" + n + "' is not a count");
      }
    }
    if (ec.methods.empty() || ec.ns.empty()) throw CLI::ValidationError("--methods/--ns", "must not be empty");
    ec.replications = exp_reps;
    ec.seed = exp_seed;
    ec.test_size = exp_test;
    ec.optimizer = exp_flags.optimizer(exp_seed);
    ec.shrink_init = exp_flags.init(MapKind::shrink);
    ec.simple_init = exp_flags.init(MapKind::simple);
    ec.matcov = exp_flags.matcov();
    ec.rmse_observed = exp_k;
    ec.rmse_draws = exp_draws;
    const auto rows = compare(ec, [](const ResultRow& r) {
      std::cerr << r.method << " n=" << r.n << " rep=" << r.replication << ' ' << r.metric << '=' << r.value << '\n';
    });
    write_file(exp_out, [&](std::ostream& o) { write_results_csv(o, rows); });

    // summary: mean and sd per method, n and metric
    std::map<std::tuple<std::string, std::size_t, std::string>, std::vector<double>> groups;
    for (const auto& r : rows) groups[{r.method, r.n, r.metric}].push_back(r.value);
    std::cout << "method,n,metric,mean,sd\n";
    for (const auto& [key, values] : groups) {
      double mean = 0.0, ss = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
      std::cout << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << mean << ',' << sd
                << '\n';
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
}
