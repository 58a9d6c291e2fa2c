#include "sensorbf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

template <class T>
std::vector<T> broadcast(const json& v, Index L, const char* key) {
  if (v.is_array()) return v.get<std::vector<T>>();
  if (v.is_number()) return std::vector<T>(static_cast<std::size_t>(std::max<Index>(L, 0)), v.get<T>());
  throw ConfigError(std::string("config: '") + key + "' must be a number or a list");
}

template <class T>
void expect_size(const std::vector<T>& v, Index L, const char* key) {
  if (static_cast<Index>(v.size()) != L)
    throw ConfigError(std::string("config: '") + key + "' has " + std::to_string(v.size()) +
                      " entries, expected L = " + std::to_string(L));
}

}  // namespace

std::string_view to_string(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::Batch:
      return "batch";
    case AlgorithmChoice::Cyclic:
      return "cyclic";
    case AlgorithmChoice::Both:
      return "both";
  }
  return "?";
}

AlgorithmChoice parse_algorithm_choice(std::string_view s) {
  if (s == "batch") return AlgorithmChoice::Batch;
  if (s == "cyclic") return AlgorithmChoice::Cyclic;
  if (s == "both") return AlgorithmChoice::Both;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected batch, cyclic or both)");
}

std::vector<Algorithm> expand(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::Batch:
      return {Algorithm::Batch};
    case AlgorithmChoice::Cyclic:
      return {Algorithm::Cyclic};
    case AlgorithmChoice::Both:
      break;
  }
  return {Algorithm::Batch, Algorithm::Cyclic};
}

void ScenarioConfig::validate() const {
  if (K < 1 || L < 1 || M < 1) throw ConfigError("config: K, L and M must be >= 1");
  expect_size(N, L, "N");
  expect_size(snr_sensor_db, L, "snr_sensor_db");
  expect_size(P, L, "P");
  for (Index n : N)
    if (n < 1) throw ConfigError("config: every N_i must be >= 1");
  for (double p : P)
    if (!(p > 0) || !std::isfinite(p)) throw ConfigError("config: every P_i must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("config: gamma must lie in [0, 1)");
  if (snr_channel_db.empty()) throw ConfigError("config: snr_channel_db is empty");
  for (double s : snr_channel_db)
    if (!std::isfinite(s)) throw ConfigError("config: channel SNR must be finite");
  for (double s : snr_sensor_db)
    if (!std::isfinite(s)) throw ConfigError("config: sensing SNR must be finite");
  if (realizations < 1) throw ConfigError("config: realizations must be >= 1");
  if (initials_per_realization < 1)
    throw ConfigError("config: initials_per_realization must be >= 1");
  if (max_outer < 0) throw ConfigError("config: max_outer must be >= 0");
  if (std::isnan(mi_tol)) throw ConfigError("config: mi_tol is NaN");
  if (baseline_trials < 0) throw ConfigError("config: baseline_trials must be >= 0");
}

ScenarioConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  ScenarioConfig c;
  try {
    c.K = j.value("K", c.K);
    c.L = j.value("L", c.L);
    c.M = j.value("M", c.M);
    c.gamma = j.value("gamma", c.gamma);
    c.realizations = j.value("realizations", c.realizations);
    c.seed = j.value("seed", c.seed);
    c.max_outer = j.value("max_outer", c.max_outer);
    c.mi_tol = j.value("mi_tol", c.mi_tol);
    c.initials_per_realization = j.value("initials_per_realization", c.initials_per_realization);
    c.baseline_trials = j.value("baseline_trials", c.baseline_trials);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm_choice(j["algorithm"].get<std::string>());
    if (j.contains("N")) c.N = broadcast<Index>(j["N"], c.L, "N");
    if (j.contains("snr_sensor_db"))
      c.snr_sensor_db = broadcast<double>(j["snr_sensor_db"], c.L, "snr_sensor_db");
    if (j.contains("P")) c.P = broadcast<double>(j["P"], c.L, "P");
    if (j.contains("snr_channel_db")) {
      const json& s = j["snr_channel_db"];
      c.snr_channel_db = s.is_array() ? s.get<std::vector<double>>()
                                      : std::vector<double>{s.get<double>()};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  static const char* const known[] = {"K", "L", "M", "N", "gamma", "snr_channel_db",
                                      "snr_sensor_db", "P", "realizations", "seed",
                                      "algorithm", "max_outer", "mi_tol",
                                      "initials_per_realization", "baseline_trials"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("config: unknown key '" + item.key() + "'");
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c, int indent) {
  json j;
  j["K"] = c.K;
  j["L"] = c.L;
  j["M"] = c.M;
  j["N"] = c.N;
  j["gamma"] = c.gamma;
  j["snr_channel_db"] = c.snr_channel_db;
  j["snr_sensor_db"] = c.snr_sensor_db;
  j["P"] = c.P;
  j["realizations"] = c.realizations;
  j["seed"] = c.seed;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["max_outer"] = c.max_outer;
  j["mi_tol"] = c.mi_tol;
  j["initials_per_realization"] = c.initials_per_realization;
  j["baseline_trials"] = c.baseline_trials;
  return j.dump(indent);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

std::uint64_t realization_seed(const ScenarioConfig& cfg, Index realization) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(realization));
}

std::uint64_t initial_seed(std::uint64_t realization_seed, Index initial) {
  return derive_seed(realization_seed, static_cast<std::uint64_t>(initial));
}

HermMat toeplitz_covariance(Index K, double gamma) {
  if (K < 1) throw PreconditionError("toeplitz_covariance: K must be >= 1");
  CMat t(K, K);
  for (Index j = 0; j < K; ++j)
    for (Index k = 0; k < K; ++k) t(j, k) = std::pow(gamma, static_cast<double>(std::abs(j - k)));
  return HermMat(t);
}

Complex complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

NetworkModel build_model(const ScenarioConfig& cfg, std::uint64_t realization_seed,
                         double snr_db) {
  cfg.validate();
  if (!std::isfinite(snr_db)) throw ConfigError("build_model: channel SNR must be finite");
  const HermMat sigma0 = toeplitz_covariance(cfg.K, cfg.gamma);
  std::mt19937_64 rng(realization_seed);
  std::vector<CMat> h;
  std::vector<HermMat> sigma_i;
  for (Index i = 0; i < cfg.L; ++i) {
    CMat hi(cfg.M, cfg.N[i]);
    for (Index c = 0; c < hi.cols(); ++c)
      for (Index r = 0; r < hi.rows(); ++r) hi(r, c) = complex_normal(rng);
    h.push_back(std::move(hi));
    sigma_i.push_back(sigma0 * (1.0 / db_to_linear(cfg.snr_sensor_db[i])));
  }
  return NetworkModel(std::move(h), sigma0, std::move(sigma_i), 1.0 / db_to_linear(snr_db), cfg.P);
}

NetworkModel build_model(const ScenarioConfig& cfg, std::uint64_t realization_seed) {
  if (cfg.snr_channel_db.empty()) throw ConfigError("config: snr_channel_db is empty");
  return build_model(cfg, realization_seed, cfg.snr_channel_db.front());
}

BeamformerSet random_full_power(const NetworkModel& m, std::mt19937_64& rng) {
  // Slightly under full power so rounding never leaves the feasible set.
  constexpr double kShrink = 1.0 - 1e-12;
  BeamformerSet f;
  for (Index i = 0; i < m.L(); ++i) {
    CMat fi(m.N(i), m.K());
    for (Index c = 0; c < fi.cols(); ++c)
      for (Index r = 0; r < fi.rows(); ++r) fi(r, c) = complex_normal(rng);
    const double pw = (fi * m.observation_covariance(i).mat() * fi.adjoint()).trace().real();
    if (pw > 0) fi *= std::sqrt(m.budget(i) / pw) * kShrink;
    f.F.push_back(std::move(fi));
  }
  return f;
}

BeamformerSet random_feasible_initial(const NetworkModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_full_power(m, rng);
}

double random_baseline_mi(const NetworkModel& m, int trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("random_baseline_mi: trials must be >= 1");
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) sum += mutual_information(m, random_full_power(m, rng));
  return sum / trials;
}

}  // namespace sensorbf
