#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sensorbf/bca_types.hpp"

namespace sensorbf {

/// Vectorized precoder subproblem for fixed (W, G):
///
///     minimize   f^H (A + C) f - 2 Re{g^H B f} + c
///     subject to f^H D_i f <= P_i
///
/// with f = [vec(F_1); ...; vec(F_L)], g = vec(G) and
///   A_ij = Sigma_s^* (x) H_i^H G W G^H H_j
///   B_i  = (W Sigma_s)^* (x) H_i
///   C_i  = Sigma_i^* (x) H_i^H G W G^H H_i
///   D_i  = blockdiag(0, (Sigma_s + Sigma_i)^* (x) I_{N_i}, 0)
///   c    = Tr{W Sigma_s} + sigma0^2 Tr{G W G^H}.
/// C and the D_i are kept as their nonzero diagonal blocks.
struct QcqpData {
  HermMat A;
  CMat B;
  std::vector<HermMat> C_blocks;
  /// Nonzero block of D_i, i.e. E_i = (Sigma_s + Sigma_i)^* (x) I_{N_i}.
  std::vector<HermMat> D_blocks;
  CVec g;
  double c = 0.0;
  std::vector<double> P;
  /// offsets[i] is the start of block i in f; offsets.back() == size().
  std::vector<Index> offsets;

  Index size() const { return offsets.back(); }
  Index blocks() const { return static_cast<Index>(P.size()); }
  Index block_size(Index i) const { return offsets[i + 1] - offsets[i]; }
  /// Dense block-diagonal C.
  HermMat C() const;
  /// Dense D_i (zero outside block i).
  HermMat D(Index i) const;
  /// A + C.
  HermMat quadratic() const;
  /// B^H g.
  CVec linear() const;
};

QcqpData assemble_qcqp(const NetworkModel& m, const WmmseState& s);

double qcqp_objective(const QcqpData& d, const CVec& f);

/// f^H D_i f.
double qcqp_block_power(const QcqpData& d, const CVec& f, Index i);

enum class QcqpStatus { Converged, BudgetExhausted };

struct QcqpResult {
  CVec f;
  QcqpStatus status = QcqpStatus::Converged;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> multipliers;
  /// ||(A + C) f - B^H g + sum_i lambda_i D_i f|| / (1 + ||B^H g||).
  double stationarity = 0.0;
  /// max_i |lambda_i (f^H D_i f - P_i)| / P_i.
  double complementarity = 0.0;
};

/// Accelerated projected gradient in whitened coordinates x_i = E_i^{1/2} f_i,
/// where every constraint is the ball ||x_i||^2 <= P_i. Iterations start at
/// zero, which yields the least-norm minimizer along directions the objective
/// ignores; f0 (with infeasible blocks projected) is returned instead when
/// its objective is lower. Throws DomainError when A + C is
/// indefinite beyond kRankTol.
QcqpResult solve_qcqp(const QcqpData& d, const CVec& f0, const QcqpOptions& opts = {});

/// Data of the conic reformulation
///
///     minimize t
///     s.t. s - 2 Re{g^H B f} + c <= t
///          || [(A + C)^{1/2} f ; (s - 1)/2] || <= (s + 1)/2
///          || [D_i^{1/2} f     ; (P_i - 1)/2] || <= (P_i + 1)/2
///
/// D_i^{1/2} is stored as its nonzero block at offsets[i].
struct SocpExport {
  HermMat sqrtAC;
  std::vector<HermMat> sqrtD_blocks;
  std::vector<Index> offsets;
  /// B^H g, the coefficient vector of 2 Re{(B^H g)^H f}.
  CVec linear;
  double c = 0.0;
  std::vector<double> P;

  /// Dense D_i^{1/2}.
  HermMat sqrtD(Index i) const;
};

SocpExport export_socp(const QcqpData& d);

/// Rotated-cone test for the objective epigraph at (f, s).
bool objective_cone_holds(const SocpExport& e, const CVec& f, double s, double tol = 0.0);
/// Rotated-cone test for power constraint i at f.
bool power_cone_holds(const SocpExport& e, const CVec& f, Index i, double tol = 0.0);
/// (s + 1)/2 - ||[D_i^{1/2} f; (P_i - 1)/2]||, nonnegative inside the cone.
double power_cone_margin(const SocpExport& e, const CVec& f, Index i);

/// Plain-text serialization (see README for the layout).
void write_socp(std::ostream& os, const SocpExport& e);
SocpExport read_socp(std::istream& is);
void write_socp_file(const std::string& path, const SocpExport& e);

/// Batch-mode BCA: starting from (G, W) = closed_form_state(f0), each outer
/// loop solves the joint QCQP for all F_i (warm-started at the current F),
/// then updates G, then W. Throws DomainError if f0 is infeasible.
BcaResult run_batch_bca(const NetworkModel& m, const BeamformerSet& f0,
                        const BcaOptions& opts = {});

}  // namespace sensorbf
