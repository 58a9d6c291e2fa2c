#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sensorbf/bca_types.hpp"
#include "sensorbf/scenario.hpp"

namespace sensorbf {

struct RunOptions {
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Off by default so repeated runs emit identical bytes.
  bool record_timing = false;
  bool compute_kkt = true;
};

struct BaselineRecord {
  Index realization = 0;
  double snr_db = 0.0;
  double mean_mi = 0.0;
};

/// Mean MI versus outer-loop index over the successful traces of one
/// (algorithm, snr) pair; shorter traces are extended with their final value.
struct MeanCurve {
  Algorithm algorithm = Algorithm::Batch;
  double snr_db = 0.0;
  int traces = 0;
  std::vector<double> mi;
};

struct ExperimentResult {
  ScenarioConfig config;
  /// Ordered by (realization, snr index, initial, algorithm).
  std::vector<IterationTrace> traces;
  std::vector<BaselineRecord> baselines;
  std::vector<MeanCurve> curves;

  int failures() const;
};

/// Every (realization, snr) pair is a work item: one model, then every
/// selected algorithm from each shared initial. Solver exceptions are caught
/// and recorded in IterationTrace::failure with mi = {MI(initial)}.
ExperimentResult run_experiment(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Config, baselines, curves and traces with their KKT reports.
void write_result_json(std::ostream& os, const ExperimentResult& r);
/// Columns: realization,initial,snr_db,algorithm,iter,mi_nats,wall_s.
void write_traces_csv(std::ostream& os, const ExperimentResult& r);
/// Columns: algorithm,snr_db,iter,mean_mi_nats,traces.
void write_curves_csv(std::ostream& os, const ExperimentResult& r);
/// Creates `dir` if needed and writes result.json, traces.csv and curves.csv.
void write_outputs(const std::string& dir, const ExperimentResult& r);

struct BenchCell {
  Index K = 1;
  Index L = 5;
  Index M = 2;
  Index N = 2;
};

struct BenchOptions {
  /// Outer loops timed per run (the stopping rule is disabled).
  int loops = 5;
  int repeats = 3;
  double snr_db = 8.0;
  double snr_sensor_db = 9.0;
  double power = 2.0;
  double gamma = 0.5;
  std::uint64_t seed = 1;
  AlgorithmChoice algorithm = AlgorithmChoice::Both;
};

struct BenchRow {
  BenchCell cell;
  Algorithm algorithm = Algorithm::Batch;
  double median_s = 0.0;
  int samples = 0;
  /// K^3 * L * N^3.
  double proxy = 0.0;
};

/// Median wall time of one outer loop for every cell and algorithm on a
/// homogeneous network.
std::vector<BenchRow> benchmark_per_loop(const std::vector<BenchCell>& grid,
                                         const BenchOptions& opts = {});

/// Least-squares slope of log(y) against log(x). Throws PreconditionError
/// with fewer than two distinct x or non-positive values.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Columns: K,L,M,N,algorithm,median_s,samples,proxy.
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace sensorbf
