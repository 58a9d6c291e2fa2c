#include "sensorbf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/cyclic_bca.hpp"
#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

using nlohmann::json;

struct WorkItem {
  Index realization = 0;
  std::size_t snr_index = 0;
};

struct ItemOutput {
  std::vector<IterationTrace> traces;
  BaselineRecord baseline;
  bool has_baseline = false;
};

BcaResult run_algorithm(Algorithm a, const NetworkModel& m, const BeamformerSet& f0,
                        const BcaOptions& o) {
  return a == Algorithm::Batch ? run_batch_bca(m, f0, o) : run_cyclic_bca(m, f0, o);
}

ItemOutput run_item(const ScenarioConfig& cfg, const RunOptions& ro, const WorkItem& w) {
  ItemOutput out;
  const double snr = cfg.snr_channel_db[w.snr_index];
  const std::uint64_t rs = realization_seed(cfg, w.realization);
  const NetworkModel m = build_model(cfg, rs, snr);

  if (cfg.baseline_trials > 0) {
    out.baseline = {w.realization, snr,
                    random_baseline_mi(m, cfg.baseline_trials, derive_seed(rs, kBaselineStream))};
    out.has_baseline = true;
  }

  BcaOptions bo;
  bo.max_outer = cfg.max_outer;
  bo.mi_tol = cfg.mi_tol;
  bo.record_timing = ro.record_timing;
  bo.compute_kkt = ro.compute_kkt;

  for (Index j = 0; j < cfg.initials_per_realization; ++j) {
    const std::uint64_t is = initial_seed(rs, j);
    const BeamformerSet f0 = random_feasible_initial(m, is);
    for (Algorithm a : expand(cfg.algorithm)) {
      IterationTrace t;
      try {
        t = run_algorithm(a, m, f0, bo).trace;
      } catch (const std::exception& e) {
        t = IterationTrace{};
        t.algorithm = a;
        t.failure = e.what();
        try {
          t.mi = {mutual_information(m, f0)};
          t.wall_s = {0.0};
        } catch (const std::exception&) {
        }
      }
      t.seed = is;
      t.realization = w.realization;
      t.initial = j;
      t.snr_db = snr;
      out.traces.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<MeanCurve> mean_curves(const ScenarioConfig& cfg,
                                   const std::vector<IterationTrace>& traces) {
  std::vector<MeanCurve> curves;
  for (Algorithm a : expand(cfg.algorithm)) {
    for (double snr : cfg.snr_channel_db) {
      MeanCurve c;
      c.algorithm = a;
      c.snr_db = snr;
      std::size_t len = 0;
      for (const auto& t : traces)
        if (t.algorithm == a && t.snr_db == snr && t.failure.empty())
          len = std::max(len, t.mi.size());
      c.mi.assign(len, 0.0);
      for (const auto& t : traces) {
        if (t.algorithm != a || t.snr_db != snr || !t.failure.empty() || t.mi.empty()) continue;
        ++c.traces;
        for (std::size_t k = 0; k < len; ++k) c.mi[k] += t.mi[std::min(k, t.mi.size() - 1)];
      }
      if (c.traces > 0)
        for (double& v : c.mi) v /= c.traces;
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

json kkt_json(const KktReport& k) {
  return {{"stationarity", k.stationarity},
          {"multipliers", k.multipliers},
          {"complementarity", k.complementarity},
          {"feasibility", k.feasibility},
          {"max_residual", k.max_residual}};
}

json trace_json(const IterationTrace& t) {
  json j = {{"realization", t.realization},
            {"initial", t.initial},
            {"snr_db", t.snr_db},
            {"algorithm", std::string(to_string(t.algorithm))},
            {"seed", t.seed},
            {"outer_loops", t.outer_loops()},
            {"final_mi", t.final_mi()},
            {"inner_budget_exhausted", t.inner_budget_exhausted},
            {"mi", t.mi},
            {"wall_s", t.wall_s}};
  j["kkt"] = t.kkt ? kkt_json(*t.kkt) : json(nullptr);
  j["failure"] = t.failure.empty() ? json(nullptr) : json(t.failure);
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int ExperimentResult::failures() const {
  return static_cast<int>(
      std::count_if(traces.begin(), traces.end(), [](const auto& t) { return !t.failure.empty(); }));
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  std::vector<WorkItem> items;
  for (Index r = 0; r < cfg.realizations; ++r)
    for (std::size_t k = 0; k < cfg.snr_channel_db.size(); ++k) items.push_back({r, k});

  std::vector<ItemOutput> slots(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t k = next++; k < items.size(); k = next++) {
      try {
        slots[k] = run_item(cfg, opts, items[k]);
      } catch (...) {
        if (!failed.exchange(true)) fatal = std::current_exception();
      }
    }
  };

  unsigned n = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, items.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  ExperimentResult res;
  res.config = cfg;
  for (auto& s : slots) {
    if (s.has_baseline) res.baselines.push_back(s.baseline);
    for (auto& t : s.traces) res.traces.push_back(std::move(t));
  }
  res.curves = mean_curves(cfg, res.traces);
  return res;
}

void write_result_json(std::ostream& os, const ExperimentResult& r) {
  json j;
  j["config"] = json::parse(config_to_json(r.config));
  j["failures"] = r.failures();
  json b = json::array();
  for (const auto& x : r.baselines)
    b.push_back({{"realization", x.realization}, {"snr_db", x.snr_db}, {"mean_mi", x.mean_mi}});
  j["baselines"] = b;
  json c = json::array();
  for (const auto& x : r.curves)
    c.push_back({{"algorithm", std::string(to_string(x.algorithm))},
                 {"snr_db", x.snr_db},
                 {"traces", x.traces},
                 {"mean_mi", x.mi}});
  j["curves"] = c;
  json t = json::array();
  for (const auto& x : r.traces) t.push_back(trace_json(x));
  j["traces"] = t;
  os << j.dump(2) << '\n';
}

void write_traces_csv(std::ostream& os, const ExperimentResult& r) {
  os << "realization,initial,snr_db,algorithm,iter,mi_nats,wall_s\n";
  for (const auto& t : r.traces)
    for (std::size_t k = 0; k < t.mi.size(); ++k)
      os << t.realization << ',' << t.initial << ',' << fmt(t.snr_db) << ',' << to_string(t.algorithm)
         << ',' << k << ',' << fmt(t.mi[k]) << ',' << fmt(k < t.wall_s.size() ? t.wall_s[k] : 0.0)
         << '\n';
}

void write_curves_csv(std::ostream& os, const ExperimentResult& r) {
  os << "algorithm,snr_db,iter,mean_mi_nats,traces\n";
  for (const auto& c : r.curves)
    for (std::size_t k = 0; k < c.mi.size(); ++k)
      os << to_string(c.algorithm) << ',' << fmt(c.snr_db) << ',' << k << ',' << fmt(c.mi[k]) << ','
         << c.traces << '\n';
}

void write_outputs(const std::string& dir, const ExperimentResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
    return out;
  };
  {
    auto out = open("result.json");
    write_result_json(out, r);
  }
  {
    auto out = open("traces.csv");
    write_traces_csv(out, r);
  }
  {
    auto out = open("curves.csv");
    write_curves_csv(out, r);
  }
}

std::vector<BenchRow> benchmark_per_loop(const std::vector<BenchCell>& grid,
                                         const BenchOptions& opts) {
  if (opts.loops < 1 || opts.repeats < 1)
    throw PreconditionError("benchmark_per_loop: loops and repeats must be >= 1");
  std::vector<BenchRow> rows;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const BenchCell& cell = grid[c];
    ScenarioConfig cfg;
    cfg.K = cell.K;
    cfg.L = cell.L;
    cfg.M = cell.M;
    cfg.N.assign(cell.L, cell.N);
    cfg.gamma = opts.gamma;
    cfg.snr_channel_db = {opts.snr_db};
    cfg.snr_sensor_db.assign(cell.L, opts.snr_sensor_db);
    cfg.P.assign(cell.L, opts.power);
    cfg.seed = opts.seed;
    const std::uint64_t rs = realization_seed(cfg, static_cast<Index>(c));
    const NetworkModel m = build_model(cfg, rs);
    const BeamformerSet f0 = random_feasible_initial(m, initial_seed(rs, 0));

    BcaOptions bo;
    bo.max_outer = opts.loops;
    bo.mi_tol = -std::numeric_limits<double>::infinity();
    bo.record_timing = true;
    bo.compute_kkt = false;

    for (Algorithm a : expand(opts.algorithm)) {
      std::vector<double> samples;
      for (int r = 0; r < opts.repeats; ++r) {
        const BcaResult res = run_algorithm(a, m, f0, bo);
        samples.insert(samples.end(), res.trace.wall_s.begin() + 1, res.trace.wall_s.end());
      }
      std::sort(samples.begin(), samples.end());
      const std::size_t h = samples.size() / 2;
      BenchRow row;
      row.cell = cell;
      row.algorithm = a;
      row.samples = static_cast<int>(samples.size());
      row.median_s = samples.size() % 2 ? samples[h] : 0.5 * (samples[h - 1] + samples[h]);
      row.proxy = std::pow(static_cast<double>(cell.K), 3) * static_cast<double>(cell.L) *
                  std::pow(static_cast<double>(cell.N), 3);
      rows.push_back(row);
    }
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw PreconditionError("loglog_slope: need at least two (x, y) pairs");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0) || !(y[k] > 0)) throw PreconditionError("loglog_slope: values must be positive");
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0)) throw PreconditionError("loglog_slope: x values are all equal");
  return sxy / sxx;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "K,L,M,N,algorithm,median_s,samples,proxy\n";
  for (const auto& r : rows)
    os << r.cell.K << ',' << r.cell.L << ',' << r.cell.M << ',' << r.cell.N << ','
       << to_string(r.algorithm) << ',' << fmt(r.median_s) << ',' << r.samples << ','
       << fmt(r.proxy) << '\n';
}

}  // namespace sensorbf
