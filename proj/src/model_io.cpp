// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace shrinktm {
namespace {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

constexpr char kMagic[8] = {'S', 'T', 'M', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void ints(const std::vector<int>& v) {
    put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
    for (int x : v) put<std::int32_t>(x);
  }
  void doubles(const double* p, std::size_t count) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw DataError("model file is truncated");
    return v;
  }
  std::string bytes(std::size_t limit = std::size_t{1} << 30) {
    const auto len = get<std::uint64_t>();
    if (len > limit) throw DataError("model file is corrupt");
    std::string s(len, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(len));
    if (!in_) throw DataError("model file is truncated");
    return s;
  }
  std::vector<int> ints(std::size_t limit) {
    const auto k = get<std::uint32_t>();
    if (k > limit) throw DataError("model file is corrupt");
    std::vector<int> v(k);
    for (auto& x : v) x = get<std::int32_t>();
    return v;
  }
  void doubles(double* p, std::size_t count) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in_) throw DataError("model file is truncated");
  }

 private:
  std::istream& in_;
};

nlohmann::json family_json(const BaseFamily& f) {
  return {{"kind", to_string(f.kind)},
          {"log_variance", f.log_variance},
          {"log_range", f.log_range},
          {"log_smoothness", f.log_smoothness},
          {"learn_smoothness", f.learn_smoothness}};
}

BaseFamily family_from_json(const nlohmann::json& j) {
  BaseFamily f;
  f.kind = family_kind_from_string(j.at("kind").get<std::string>());
  f.log_variance = j.at("log_variance").get<double>();
  f.log_range = j.at("log_range").get<double>();
  f.log_smoothness = j.at("log_smoothness").get<double>();
  f.learn_smoothness = j.at("learn_smoothness").get<bool>();
  return f;
}

nlohmann::json hyper_json(const HyperParams& hp) {
  return {{"kind", to_string(hp.kind)},       {"base", family_json(hp.base)},
          {"log_cd", hp.log_cd},               {"theta_sigma1", hp.theta_sigma1},
          {"theta_sigma2", hp.theta_sigma2},   {"theta_q", hp.theta_q},
          {"theta_gamma", hp.theta_gamma},     {"theta_sigma0", hp.theta_sigma0},
          {"theta_d1", hp.theta_d1},           {"theta_d2", hp.theta_d2},
          {"epsilon", hp.epsilon},             {"m", hp.m},
          {"m_max", hp.m_max},                 {"shape", to_string(hp.shape)}};
}

HyperParams hyper_from_json(const nlohmann::json& j) {
  HyperParams hp;
  hp.kind = map_kind_from_string(j.at("kind").get<std::string>());
  hp.base = family_from_json(j.at("base"));
  hp.log_cd = j.at("log_cd").get<double>();
  hp.theta_sigma1 = j.at("theta_sigma1").get<double>();
  hp.theta_sigma2 = j.at("theta_sigma2").get<double>();
  hp.theta_q = j.at("theta_q").get<double>();
  hp.theta_gamma = j.at("theta_gamma").get<double>();
  hp.theta_sigma0 = j.at("theta_sigma0").get<double>();
  hp.theta_d1 = j.at("theta_d1").get<double>();
  hp.theta_d2 = j.at("theta_d2").get<double>();
  hp.epsilon = j.at("epsilon").get<double>();
  hp.m = j.at("m").get<int>();
  hp.m_max = j.at("m_max").get<int>();
  hp.shape = kernel_shape_from_string(j.at("shape").get<std::string>());
  return hp;
}

std::uint8_t method_code(Method m) { return static_cast<std::uint8_t>(m); }

void check_index(const std::vector<int>& v, std::size_t bound) {
  for (int x : v)
    if (x < 0 || static_cast<std::size_t>(x) >= bound) throw DataError("model file is corrupt");
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  const std::size_t big_n = model.locs.size();
  const bool has_map = model.method != Method::matcov;
  if (has_map && (!model.map || model.map->size() != big_n)) throw DataError("model has no map for its locations");
  if (model.ordering.size() != big_n) throw DataError("model ordering does not match its locations");
  const std::size_t n = has_map ? model.map->replicates : model.replicates;

  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint8_t>(method_code(model.method));
  w.put<std::uint64_t>(big_n);
  w.put<std::uint64_t>(n);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(has_map ? model.map->hp.m : 0));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(has_map ? model.map->mprime : 0));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.locs.dim()));
  w.put<double>(model.objective);
  w.put<double>(model.color_limit);
  w.bytes((has_map ? hyper_json(model.map->hp) : family_json(model.family)).dump());

  for (std::size_t r = 0; r < big_n; ++r) {
    const std::string& id = model.locs.ids[r];
    w.put<std::uint32_t>(static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (int c = 0; c < model.locs.dim(); ++c) w.put<double>(model.locs.coords(static_cast<Eigen::Index>(r), c));
  }
  const Ordering& ord = model.ordering;
  for (std::size_t p : ord.perm) w.put<std::uint64_t>(p);
  w.doubles(ord.scales.data(), big_n);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ord.max_neighbors));
  for (const auto& nb : ord.neighbors) w.ints(nb);

  if (!has_map) return;
  for (const ComponentFit& c : model.map->components) {
    w.ints(c.cond);
    w.doubles(c.xi.data(), static_cast<std::size_t>(c.xi.size()));
    w.put<double>(c.tau2);
    w.ints(c.inputs);
    w.doubles(c.kernel.qdiag.data(), static_cast<std::size_t>(c.kernel.qdiag.size()));
    w.put<double>(c.kernel.sigma0_sq);
    w.put<double>(c.kernel.sigma_sq);
    w.put<double>(c.kernel.gamma);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(c.kernel.shape));
    w.doubles(c.design.data(), static_cast<std::size_t>(c.design.size()));
    for (Eigen::Index r = 0; r < c.g_factor.rows(); ++r)
      for (Eigen::Index k = 0; k <= r; ++k) w.put<double>(c.g_factor(r, k));
    w.doubles(c.weights.data(), static_cast<std::size_t>(c.weights.size()));
    w.put<double>(c.alpha);
    w.put<double>(c.beta);
    w.put<double>(c.alpha_tilde);
    w.put<double>(c.beta_tilde);
  }
  if (!out) throw DataError("failed to write model");
}

Model load_model(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DataError("not a model file");
  Reader r(in);
  if (r.get<std::uint32_t>() != kVersion) throw DataError("unsupported model file version");
  const auto code = r.get<std::uint8_t>();
  if (code > method_code(Method::matcov)) throw DataError("model file is corrupt");
  Model model;
  model.method = static_cast<Method>(code);
  const bool has_map = model.method != Method::matcov;
  const auto big_n = r.get<std::uint64_t>();
  const auto n = r.get<std::uint64_t>();
  r.get<std::uint32_t>();  // m, repeated in the JSON block
  const auto mprime = r.get<std::uint32_t>();
  const auto dim = r.get<std::uint32_t>();
  if (big_n < 1 || big_n > (1u << 28) || n > (1u << 28) || dim < 1 || dim > 3) throw DataError("model file is corrupt");
  model.objective = r.get<double>();
  model.color_limit = r.get<double>();
  model.replicates = n;

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(r.bytes(1u << 20));
    if (has_map)
      model.map.emplace().hp = hyper_from_json(meta);
    else
      model.family = family_from_json(meta);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model parameters are corrupt: ") + e.what());
  }

  model.locs.coords.resize(static_cast<Eigen::Index>(big_n), dim);
  model.locs.ids.resize(big_n);
  for (std::size_t k = 0; k < big_n; ++k) {
    const auto len = r.get<std::uint32_t>();
    if (len > (1u << 16)) throw DataError("model file is corrupt");
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) throw DataError("model file is truncated");
    model.locs.ids[k] = std::move(id);
    for (std::uint32_t c = 0; c < dim; ++c) model.locs.coords(static_cast<Eigen::Index>(k), c) = r.get<double>();
  }
  Ordering& ord = model.ordering;
  ord.perm.resize(big_n);
  ord.rank.assign(big_n, big_n);
  for (std::size_t k = 0; k < big_n; ++k) {
    ord.perm[k] = r.get<std::uint64_t>();
    if (ord.perm[k] >= big_n || ord.rank[ord.perm[k]] != big_n) throw DataError("model ordering is not a permutation");
    ord.rank[ord.perm[k]] = k;
  }
  ord.scales.resize(big_n);
  r.doubles(ord.scales.data(), big_n);
  ord.max_neighbors = static_cast<int>(r.get<std::uint32_t>());
  ord.neighbors.resize(big_n);
  for (std::size_t k = 0; k < big_n; ++k) {
    ord.neighbors[k] = r.ints(static_cast<std::size_t>(ord.max_neighbors));
    check_index(ord.neighbors[k], k);
  }

  if (!has_map) return model;
  FittedMap& map = *model.map;
  map.ordering = ord;
  map.replicates = n;
  map.mprime = static_cast<int>(mprime);
  map.components.resize(big_n);
  const auto nn = static_cast<Eigen::Index>(n);
  for (std::size_t i = 0; i < big_n; ++i) {
    ComponentFit& c = map.components[i];
    c.cond = r.ints(i);
    check_index(c.cond, i);
    c.xi.resize(static_cast<Eigen::Index>(c.cond.size()));
    r.doubles(c.xi.data(), c.cond.size());
    c.tau2 = r.get<double>();
    c.inputs = r.ints(i);
    check_index(c.inputs, i);
    const auto width = static_cast<Eigen::Index>(c.inputs.size());
    c.kernel.qdiag.resize(width);
    r.doubles(c.kernel.qdiag.data(), c.inputs.size());
    c.kernel.sigma0_sq = r.get<double>();
    c.kernel.sigma_sq = r.get<double>();
    c.kernel.gamma = r.get<double>();
    const auto shape = r.get<std::uint8_t>();
    if (shape > static_cast<std::uint8_t>(KernelShape::matern32)) throw DataError("model file is corrupt");
    c.kernel.shape = static_cast<KernelShape>(shape);
    c.design.resize(nn, width);
    r.doubles(c.design.data(), static_cast<std::size_t>(nn * width));
    c.g_factor = Matrix::Zero(nn, nn);
    for (Eigen::Index row = 0; row < nn; ++row)
      for (Eigen::Index k = 0; k <= row; ++k) c.g_factor(row, k) = r.get<double>();
    c.weights.resize(nn);
    r.doubles(c.weights.data(), n);
    c.alpha = r.get<double>();
    c.beta = r.get<double>();
    c.alpha_tilde = r.get<double>();
    c.beta_tilde = r.get<double>();
  }
  return model;
}

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  save_model(out, model);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace shrinktm
