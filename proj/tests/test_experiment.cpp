#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/cyclic_bca.hpp"
#include "sensorbf/errors.hpp"
#include "sensorbf/experiment.hpp"
#include "sensorbf/verify.hpp"
#include "test_support.hpp"

using namespace sensorbf;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.realizations = 3;
  c.max_outer = 15;
  c.baseline_trials = 5;
  return c;
}

std::string dump_json(const ExperimentResult& r) {
  std::ostringstream os;
  write_result_json(os, r);
  return os.str();
}

std::string dump_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_traces_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("toeplitz covariance") {
  const HermMat a = toeplitz_covariance(4, 0.0);
  CHECK((a.mat() - CMat::Identity(4, 4)).norm() == 0.0);

  const HermMat b = toeplitz_covariance(3, 0.5);
  CMat expect(3, 3);
  expect << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  CHECK((b.mat() - expect).norm() < 1e-15);
}

TEST_CASE("build_model applies the SNR definitions") {
  ScenarioConfig c;
  c.snr_sensor_db = {10.0, 0.0, -3.0};
  c.snr_channel_db = {20.0};
  const NetworkModel m = build_model(c, 42);
  CHECK(m.sigma_s().mat()(0, 0).real() == doctest::Approx(1.0));
  CHECK(m.sigma_i(0).mat()(0, 0).real() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.sigma_i(1).mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.sigma_i(0).mat()(0, 1).real() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(m.sigma0_sq() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(m.N(2) == 5);
  CHECK(m.budget(2) == 3.0);

  // Channels depend only on the realization seed.
  const NetworkModel m2 = build_model(c, 42, -5.0);
  for (Index i = 0; i < m.L(); ++i) CHECK((m.channel(i) - m2.channel(i)).norm() == 0.0);
  const NetworkModel m3 = build_model(c, 43);
  CHECK((m.channel(0) - m3.channel(0)).norm() > 0.0);
}

TEST_CASE("build_model rejects invalid configs") {
  ScenarioConfig c;
  c.gamma = 1.0;
  CHECK_THROWS_AS(build_model(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.P = {1.0, 2.0};
  CHECK_THROWS_AS(build_model(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.snr_channel_db = {NAN};
  CHECK_THROWS_AS(build_model(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.realizations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(R"({"K": 4, "L": 5, "M": 4, "N": 5, "P": 2,
      "snr_sensor_db": 9, "snr_channel_db": [0, 4], "algorithm": "cyclic", "seed": 18446744073709551615})");
  CHECK(c.N == std::vector<Index>(5, 5));
  CHECK(c.P == std::vector<double>(5, 2.0));
  CHECK(c.snr_channel_db.size() == 2);
  CHECK(c.algorithm == AlgorithmChoice::Cyclic);
  CHECK(c.seed == ~std::uint64_t{0});

  const ScenarioConfig d = parse_config(config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));

  CHECK_THROWS_AS(parse_config(R"({"K": 3, "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"L": 2, "N": [1, 2, 3], "P": 1, "snr_sensor_db": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"gamma": -0.1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"algorithm": "fast"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"K": "three"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("derive_seed") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(s, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("random_feasible_initial") {
  ScenarioConfig c;
  const NetworkModel m = build_model(c, 5);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const BeamformerSet f = random_feasible_initial(m, s);
    for (Index i = 0; i < m.L(); ++i) {
      const double ratio = transmit_power(m, f, i) / m.budget(i);
      CHECK(ratio >= 1.0 - 1e-10);
      CHECK(ratio <= 1.0);
    }
  }

  const BeamformerSet a = random_feasible_initial(m, 99), b = random_feasible_initial(m, 99);
  for (Index i = 0; i < m.L(); ++i) CHECK((a.F[i] - b.F[i]).norm() == 0.0);

  std::set<std::string> hashes;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const CVec v = random_feasible_initial(m, s).stacked();
    hashes.insert(std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(Complex)));
  }
  CHECK(hashes.size() == 100);
}

TEST_CASE("random_baseline_mi") {
  ScenarioConfig c;
  const NetworkModel m = build_model(c, 11);
  CHECK(random_baseline_mi(m, 1, 5) == mutual_information(m, random_feasible_initial(m, 5)));
  CHECK_THROWS_AS(random_baseline_mi(m, 0, 5), PreconditionError);

  c.snr_channel_db = {-60.0};
  const NetworkModel quiet = build_model(c, 11);
  CHECK(random_baseline_mi(quiet, 20, 3) <= 1e-3);

  c.snr_channel_db = {8.0};
  const NetworkModel fig = build_model(c, 11);
  const double base = random_baseline_mi(fig, 50, 3);
  const BeamformerSet f0 = random_feasible_initial(fig, 1);
  CHECK(run_batch_bca(fig, f0).trace.final_mi() > base);
  CHECK(run_cyclic_bca(fig, f0).trace.final_mi() > base);
}

TEST_CASE("run_experiment shares the initial between algorithms") {
  ScenarioConfig c = small_config();
  c.realizations = 1;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.traces.size() == 2);
  CHECK(r.traces[0].algorithm == Algorithm::Batch);
  CHECK(r.traces[1].algorithm == Algorithm::Cyclic);
  CHECK(r.traces[0].seed == r.traces[1].seed);
  CHECK(r.traces[0].mi[0] == r.traces[1].mi[0]);

  const NetworkModel m = build_model(c, realization_seed(c, 0));
  CHECK(r.traces[0].mi[0] == mutual_information(m, random_feasible_initial(m, r.traces[0].seed)));
}

TEST_CASE("run_experiment is deterministic and thread-count independent") {
  ScenarioConfig c = small_config();
  c.snr_channel_db = {0.0, 8.0};
  c.initials_per_realization = 2;
  const ExperimentResult a = run_experiment(c, {1, false, true});
  const ExperimentResult b = run_experiment(c, {3, false, true});
  CHECK(dump_json(a) == dump_json(b));
  CHECK(dump_csv(a) == dump_csv(b));
  CHECK(a.traces.size() == 3 * 2 * 2 * 2);
  CHECK(a.baselines.size() == 6);
  CHECK(a.failures() == 0);

  for (std::size_t k = 1; k < a.traces.size(); ++k) {
    const auto& p = a.traces[k - 1];
    const auto& q = a.traces[k];
    const auto key = [](const IterationTrace& t) {
      return std::make_tuple(t.realization, t.snr_db, t.initial, static_cast<int>(t.algorithm));
    };
    CHECK(key(p) < key(q));
  }
  for (const auto& t : a.traces) {
    CHECK(t.is_monotone(1e-9));
    CHECK(t.mi.size() == t.wall_s.size());
    CHECK(t.kkt.has_value());
    for (double w : t.wall_s) CHECK(w == 0.0);
  }
}

TEST_CASE("mean curves are monotone on the heterogeneous scenario") {
  ScenarioConfig c;
  c.realizations = 30;
  c.baseline_trials = 0;
  const ExperimentResult r = run_experiment(c, {0, false, false});
  REQUIRE(r.curves.size() == 2);
  for (const auto& curve : r.curves) {
    CHECK(curve.traces == 30);
    for (std::size_t k = 1; k < curve.mi.size(); ++k) CHECK(curve.mi[k] >= curve.mi[k - 1] - 1e-9);
  }
}

TEST_CASE("output writers") {
  ScenarioConfig c = small_config();
  c.realizations = 1;
  c.algorithm = AlgorithmChoice::Cyclic;
  const ExperimentResult r = run_experiment(c);
  const std::string csv = dump_csv(r);
  CHECK(csv.rfind("realization,initial,snr_db,algorithm,iter,mi_nats,wall_s\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 1 + r.traces[0].mi.size());

  const std::string json = dump_json(r);
  CHECK(json.find("\"traces\"") != std::string::npos);
  CHECK(json.find("\"max_residual\"") != std::string::npos);

  std::ostringstream curves;
  write_curves_csv(curves, r);
  CHECK(curves.str().rfind("algorithm,snr_db,iter,mean_mi_nats,traces\n", 0) == 0);
}

TEST_CASE("benchmark_per_loop") {
  BenchOptions o;
  o.loops = 3;
  o.repeats = 1;
  o.algorithm = AlgorithmChoice::Cyclic;
  const auto one = benchmark_per_loop({{1, 5, 2, 2}}, o);
  REQUIRE(one.size() == 1);
  CHECK(one[0].samples == 3);
  CHECK(one[0].median_s > 0.0);
  CHECK(one[0].proxy == 40.0);

  o.algorithm = AlgorithmChoice::Both;
  const auto both = benchmark_per_loop({{2, 3, 2, 2}}, o);
  CHECK(both.size() == 2);

  std::ostringstream os;
  write_bench_csv(os, both);
  CHECK(os.str().rfind("K,L,M,N,algorithm,median_s,samples,proxy\n", 0) == 0);
}

TEST_CASE("loglog_slope") {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(loglog_slope({2.0, 2.0}, {1.0, 3.0}), PreconditionError);
  CHECK_THROWS_AS(loglog_slope({1.0, 2.0}, {0.0, 3.0}), PreconditionError);
}

TEST_CASE("verify suite passes on random instances") {
  const VerifyReport r = run_verify_suite(10, 3);
  CHECK(r.passed());
  CHECK(r.checks.size() == 9);
}
