#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/errors.hpp"
#include "sensorbf/experiment.hpp"
#include "sensorbf/verify.hpp"

using namespace sensorbf;

namespace {

void print_summary(const ExperimentResult& r) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> finals;
  for (const auto& t : r.traces) {
    if (!t.failure.empty()) continue;
    auto& acc = finals[{std::string(to_string(t.algorithm)), t.snr_db}];
    acc.first += t.final_mi();
    ++acc.second;
  }
  for (const auto& [key, acc] : finals)
    std::printf("%-7s snr %6.2f dB  mean final MI %.6f nats over %d runs\n", key.first.c_str(),
                key.second, acc.first / acc.second, acc.second);
  std::map<double, std::pair<double, int>> base;
  for (const auto& b : r.baselines) {
    base[b.snr_db].first += b.mean_mi;
    ++base[b.snr_db].second;
  }
  for (const auto& [snr, acc] : base)
    std::printf("random  snr %6.2f dB  mean baseline MI %.6f nats\n", snr, acc.first / acc.second);
  if (r.failures() > 0) std::printf("%d runs failed (see result.json)\n", r.failures());
}

// SOCP of the first batch step for realization 0, initial 0 at the first SNR.
void export_first_socp(const ScenarioConfig& cfg, const std::string& path) {
  const std::uint64_t rs = realization_seed(cfg, 0);
  const NetworkModel m = build_model(cfg, rs);
  const BeamformerSet f0 = random_feasible_initial(m, initial_seed(rs, 0));
  write_socp_file(path, export_socp(assemble_qcqp(m, closed_form_state(m, f0))));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear beamformer design for coherent-MAC sensor networks"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "results", algo, socp_path;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Monte-Carlo experiment from a JSON scenario file");
  run->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--algo", algo, "batch, cyclic or both")
      ->check(CLI::IsMember({"batch", "cyclic", "both"}));
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--export-socp", socp_path, "Write the first batch-step SOCP to this file");
  run->add_flag("--timing", timing, "Record per-loop wall time (outputs become run-dependent)");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  std::vector<Index> bK{1}, bL{5, 10, 20}, bN{2}, bM;
  int loops = 5, repeats = 3;
  std::string bench_algo = "both", bench_csv;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Per-outer-loop timing over a size grid");
  bench->add_option("--K", bK, "Source dimensions")->capture_default_str();
  bench->add_option("--L", bL, "Sensor counts")->capture_default_str();
  bench->add_option("--N", bN, "Antennas per sensor")->capture_default_str();
  bench->add_option("--M", bM, "FC antennas (default max(K, 2))");
  bench->add_option("--loops", loops, "Timed outer loops per run")->capture_default_str();
  bench->add_option("--repeats", repeats, "Runs per cell and algorithm")->capture_default_str();
  bench->add_option("--algo", bench_algo, "batch, cyclic or both")
      ->check(CLI::IsMember({"batch", "cyclic", "both"}));
  bench->add_option("--seed", bench_seed, "Channel seed")->capture_default_str();
  bench->add_option("--csv", bench_csv, "Also write the table to this file");

  int instances = 100;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Invariant suite on random instances");
  verify->add_option("--instances", instances, "Random instances")->capture_default_str();
  verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ScenarioConfig cfg = load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!algo.empty()) cfg.algorithm = parse_algorithm_choice(algo);
      RunOptions ro;
      ro.threads = threads;
      ro.record_timing = timing;
      const ExperimentResult r = run_experiment(cfg, ro);
      write_outputs(out_dir, r);
      if (!socp_path.empty()) export_first_socp(cfg, socp_path);
      print_summary(r);
      std::printf("wrote %s/{result.json,traces.csv,curves.csv}\n", out_dir.c_str());
      return 0;
    }
    if (*bench) {
      std::vector<BenchCell> grid;
      for (Index K : bK)
        for (Index L : bL)
          for (Index N : bN) {
            if (bM.empty()) {
              grid.push_back({K, L, std::max<Index>(K, 2), N});
            } else {
              for (Index M : bM) grid.push_back({K, L, M, N});
            }
          }
      BenchOptions bo;
      bo.loops = loops;
      bo.repeats = repeats;
      bo.seed = bench_seed;
      bo.algorithm = parse_algorithm_choice(bench_algo);
      const auto rows = benchmark_per_loop(grid, bo);
      write_bench_csv(std::cout, rows);
      if (!bench_csv.empty()) {
        std::ofstream f(bench_csv);
        write_bench_csv(f, rows);
      }
      for (Algorithm a : expand(bo.algorithm)) {
        std::vector<double> x, y;
        for (const auto& r : rows)
          if (r.algorithm == a) x.push_back(r.proxy), y.push_back(r.median_s);
        try {
          std::printf("# %s log-log slope vs K^3*sum(N_i^3): %.3f\n",
                      std::string(to_string(a)).c_str(), loglog_slope(x, y));
        } catch (const PreconditionError&) {
        }
      }
      return 0;
    }
    if (*verify) {
      const VerifyReport r = run_verify_suite(instances, verify_seed);
      print_verify_report(std::cout, r);
      return r.passed() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
