#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sensorbf/bca_types.hpp"
#include "sensorbf/model.hpp"

namespace sensorbf {

enum class AlgorithmChoice { Batch, Cyclic, Both };

std::string_view to_string(AlgorithmChoice a);
/// Accepts "batch", "cyclic" and "both"; throws ConfigError otherwise.
AlgorithmChoice parse_algorithm_choice(std::string_view s);
std::vector<Algorithm> expand(AlgorithmChoice a);

/// Monte-Carlo scenario. Covariances are Toeplitz, Sigma0[j,k] = gamma^|j-k|,
/// with Sigma_s = Sigma0 (sigma_s^2 = 1), Sigma_i = 10^(-snr_sensor_db[i]/10) Sigma0
/// and sigma0^2 = 10^(-snr_db/10) for each entry of snr_channel_db.
struct ScenarioConfig {
  Index K = 3;
  Index L = 3;
  Index M = 4;
  std::vector<Index> N{3, 4, 5};
  double gamma = 0.5;
  std::vector<double> snr_channel_db{8.0};
  std::vector<double> snr_sensor_db{8.0, 9.0, 10.0};
  std::vector<double> P{2.0, 2.0, 3.0};
  int realizations = 30;
  std::uint64_t seed = 1;
  AlgorithmChoice algorithm = AlgorithmChoice::Both;
  int max_outer = 100;
  double mi_tol = 1e-8;
  int initials_per_realization = 1;
  /// Random full-power draws averaged per realization; 0 disables the baseline.
  int baseline_trials = 50;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// JSON object with the field names above. N, snr_sensor_db and P accept a
/// scalar (broadcast to all L sensors) or a list of length L; snr_channel_db
/// accepts a scalar or a sweep list. Missing keys keep their defaults and
/// unknown keys are rejected. Throws ConfigError.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

/// splitmix64 mix of (seed, index); used for every derived stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

inline constexpr std::uint64_t kBaselineStream = ~std::uint64_t{0};

std::uint64_t realization_seed(const ScenarioConfig& cfg, Index realization);
std::uint64_t initial_seed(std::uint64_t realization_seed, Index initial);

/// K x K matrix with entries gamma^|j-k|.
HermMat toeplitz_covariance(Index K, double gamma);

/// Channels H_i with i.i.d. CN(0, 1) entries drawn from mt19937_64(realization_seed)
/// (sensor by sensor, column-major); the draw does not depend on snr_db.
NetworkModel build_model(const ScenarioConfig& cfg, std::uint64_t realization_seed,
                         double snr_db);
/// Uses cfg.snr_channel_db.front().
NetworkModel build_model(const ScenarioConfig& cfg, std::uint64_t realization_seed);

/// Standard complex Gaussian sample, E|z|^2 = 1.
Complex complex_normal(std::mt19937_64& rng);

/// F_i with i.i.d. CN(0, 1) entries, each scaled so that its power sits just
/// below P_i (ratio 1 - 2e-12).
BeamformerSet random_full_power(const NetworkModel& m, std::mt19937_64& rng);
BeamformerSet random_feasible_initial(const NetworkModel& m, std::uint64_t seed);

/// Mean MI of `trials` consecutive random_full_power draws from mt19937_64(seed).
/// The first draw equals random_feasible_initial(m, seed).
double random_baseline_mi(const NetworkModel& m, int trials, std::uint64_t seed);

}  // namespace sensorbf
