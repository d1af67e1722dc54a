// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "shrinktm/table_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

class Workdir {
 public:
  Workdir() : path_(fs::temp_directory_path() / ("shrinktm_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const Workdir& dir, const std::string& args) {
  const std::string log = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + SHRINKTM_CLI + "\" " + args + " > \"" + log + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(log);
  return r;
}

// "name = value" lines of a fit report.
std::map<std::string, double> report(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    try {
      out[line.substr(0, eq)] = std::stod(line.substr(eq + 3));
    } catch (const std::exception&) {
    }
  }
  return out;
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes one row per replicate in file order") {
    Workdir d;
    const Run r = run(d, "simulate --grid 2x2 --n 1 --seed 3 --out " + d / "sim");
    REQUIRE(r.code == 0);
    const auto locs = shrinktm::read_locations_file(d / "sim/locations.csv");
    CHECK(locs.size() == 4);
    const auto y = shrinktm::read_data_file(d / "sim/data.csv", locs);
    CHECK(y.rows() == 1);
    CHECK(y.cols() == 4);
    CHECK(line_count(slurp(d / "sim/data.csv")) == 2);
  }

  TEST_CASE("simulate is reproducible and nr with zero amplitude equals lr") {
    Workdir d;
    REQUIRE(run(d, "simulate --design lr --grid 4x3 --n 3 --seed 8 --out " + d / "a").code == 0);
    REQUIRE(run(d, "simulate --design lr --grid 4x3 --n 3 --seed 8 --out " + d / "b").code == 0);
    REQUIRE(run(d, "simulate --design nr --amplitude 0 --grid 4x3 --n 3 --seed 8 --out " + d / "c").code == 0);
    CHECK(slurp(d / "a/data.csv") == slurp(d / "b/data.csv"));
    CHECK(slurp(d / "a/data.csv") == slurp(d / "c/data.csv"));
    REQUIRE(run(d, "simulate --grid 4x3 --n 0 --out " + d / "e").code == 0);
    CHECK(line_count(slurp(d / "e/data.csv")) == 1);
  }

  TEST_CASE("fit, sample and score a single-replicate model") {
    Workdir d;
    REQUIRE(run(d, "simulate --grid 5x5 --n 1 --seed 1 --out " + d / "train").code == 0);
    REQUIRE(run(d, "simulate --grid 5x5 --n 4 --seed 2 --out " + d / "test").code == 0);
    REQUIRE(run(d, "simulate --grid 5x5 --n 1 --seed 3 --out " + d / "one").code == 0);
    const std::string locs = " --locs " + d / "train/locations.csv";
    const Run f = run(d, "fit --data " + d / "train/data.csv" + locs + " --iters 20 --out " + d / "m.stm" +
                             " --trace " + d / "trace.csv");
    REQUIRE(f.code == 0);
    const auto rep = report(f.out);
    CHECK(rep.count("objective") == 1);
    CHECK(rep.count("mprime") == 1);
    CHECK(rep.count("theta_gamma") == 1);
    CHECK(line_count(slurp(d / "trace.csv")) >= 2);

    const Run s = run(d, "sample --model " + d / "m.stm" + " --n 3 --svg --out " + d / "samples.csv");
    REQUIRE(s.code == 0);
    CHECK(line_count(slurp(d / "samples.csv")) == 4);
    CHECK(fs::exists(d / "samples_1.svg"));

    const Run c = run(d, "sample --model " + d / "m.stm" + " --n 2 --condition-on " + d / "one/data.csv" +
                             " --observed-k 5 --out " + d / "cond.csv");
    REQUIRE(c.code == 0);
    CHECK(line_count(slurp(d / "cond.csv")) == 3);
    CHECK(run(d, "sample --model " + d / "m.stm" + " --condition-on " + d / "test/data.csv" + " --out " + d / "x.csv").code == 2);

    const Run sc = run(d, "score --model " + d / "m.stm" + " --data " + d / "test/data.csv" + " --rmse-k 5 --draws 5");
    REQUIRE(sc.code == 0);
    const auto scores = report(sc.out);
    CHECK(scores.count("logscore") == 1);
    CHECK(scores.count("rmse") == 1);
    CHECK(scores.at("logscore_per_location") == doctest::Approx(scores.at("logscore") / 25.0));
  }

  TEST_CASE("refitting from the fitted parameters does not lose ground") {
    Workdir d;
    REQUIRE(run(d, "simulate --grid 5x5 --n 2 --seed 4 --out " + d / "train").code == 0);
    const std::string base = "fit --data " + d / "train/data.csv" + " --locs " + d / "train/locations.csv";
    const Run first = run(d, base + " --iters 30 --out " + d / "a.stm");
    REQUIRE(first.code == 0);
    const Run again = run(d, base + " --iters 1 --init-from " + d / "a.stm" + " --out " + d / "b.stm");
    REQUIRE(again.code == 0);
    CHECK(std::abs(report(again.out).at("objective") - report(first.out).at("objective")) < 1e-4);
  }

  TEST_CASE("matcov fit reports three parameters") {
    Workdir d;
    REQUIRE(run(d, "simulate --grid 5x5 --n 2 --seed 5 --out " + d / "train").code == 0);
    const Run f = run(d, "fit --method matcov --data " + d / "train/data.csv" + " --locs " + d / "train/locations.csv" +
                             " --iters 20 --out " + d / "mc.stm");
    REQUIRE(f.code == 0);
    const auto rep = report(f.out);
    CHECK(rep.count("variance") == 1);
    CHECK(rep.count("range") == 1);
    CHECK(rep.count("smoothness") == 1);
    CHECK(run(d, "sample --model " + d / "mc.stm" + " --n 2 --out " + d / "s.csv").code == 0);
  }

  TEST_CASE("experiment writes one row per combination") {
    Workdir d;
    const Run r = run(d, "experiment --grid 4x4 --ns 1,2 --reps 2 --test-size 2 --iters 3 --methods shrinktm,simpletm --out " +
                             d / "res.csv");
    REQUIRE(r.code == 0);
    CHECK(line_count(slurp(d / "res.csv")) == 1 + 2 * 2 * 2 * 2);
    CHECK(r.out.find("method,n,metric,mean,sd") != std::string::npos);
  }

  TEST_CASE("configuration files set defaults and flags override them") {
    Workdir d;
    {
      std::ofstream cfg(d / "sim.cfg");
      cfg << "# simulation defaults\ngrid = 3x2\nn = 2\n";
    }
    REQUIRE(run(d, "--config " + d / "sim.cfg" + " simulate --out " + d / "a").code == 0);
    CHECK(line_count(slurp(d / "a/data.csv")) == 3);
    CHECK(line_count(slurp(d / "a/locations.csv")) == 7);
    REQUIRE(run(d, "--config " + d / "sim.cfg" + " simulate --n 4 --out " + d / "b").code == 0);
    CHECK(line_count(slurp(d / "b/data.csv")) == 5);
  }

  TEST_CASE("exit codes") {
    Workdir d;
    CHECK(run(d, "--help").code == 0);
    CHECK(run(d, "fit --help").code == 0);
    CHECK(run(d, "fit --bogus").code == 1);
    CHECK(run(d, "").code == 1);
    CHECK(run(d, "simulate --design spiral").code == 1);
    const Run missing = run(d, "fit --data " + d / "none.csv" + " --locs " + d / "none.csv");
    CHECK(missing.code == 2);
    CHECK(missing.out.find("none.csv") != std::string::npos);
    CHECK(run(d, "sample --model " + d / "none.stm").code == 2);
  }
}
