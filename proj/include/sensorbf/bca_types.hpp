#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensorbf/kkt.hpp"
#include "sensorbf/model.hpp"
#include "sensorbf/wmmse.hpp"

namespace sensorbf {

enum class Algorithm { Batch, Cyclic };

std::string_view to_string(Algorithm a);
/// Accepts "batch" and "cyclic"; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view s);

/// Inner solver controls for the joint precoder QCQP.
struct QcqpOptions {
  int max_iter = 50000;
  /// Stop when the gradient-mapping norm falls below tol * (1 + ||b||).
  double tol = 1e-9;
};

struct BcaOptions {
  int max_outer = 100;
  /// Stop once an outer loop raises MI by less than this (nats).
  double mi_tol = 1e-8;
  QcqpOptions inner;
  /// Record per-loop wall-clock seconds; when false all times are 0.
  bool record_timing = true;
  /// Attach kkt_residual_p0 of the final iterate to the trace.
  bool compute_kkt = true;
};

/// Per-run record: mi[0] and wall_s[0] describe the initial point, entry j
/// the state after outer loop j.
struct IterationTrace {
  Algorithm algorithm = Algorithm::Batch;
  std::vector<double> mi;
  std::vector<double> wall_s;
  std::optional<KktReport> kkt;
  std::uint64_t seed = 0;
  Index realization = 0;
  Index initial = 0;
  double snr_db = 0.0;
  /// Outer loops whose inner QCQP hit its iteration cap.
  int inner_budget_exhausted = 0;
  /// Empty on success; otherwise the failure message.
  std::string failure;

  int outer_loops() const { return mi.empty() ? 0 : static_cast<int>(mi.size()) - 1; }
  double final_mi() const { return mi.empty() ? 0.0 : mi.back(); }
  /// Smallest mi[j+1] - mi[j] (+inf for fewer than two entries).
  double min_increment() const;
  bool is_monotone(double tol = 1e-9) const { return min_increment() >= -tol; }
};

struct BcaResult {
  BeamformerSet F;
  WmmseState state;
  IterationTrace trace;
};

}  // namespace sensorbf
