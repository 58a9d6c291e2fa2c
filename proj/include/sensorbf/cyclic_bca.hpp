#pragma once

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/bca_types.hpp"
#include "sensorbf/trs.hpp"

namespace sensorbf {

/// Single-sensor precoder subproblem with every other F_j held fixed:
///
///     minimize   f_i^H Q f_i - 2 Re{lin^H f_i}
///     subject to f_i^H E f_i <= P
///
/// where Q = A_ii + C_i, lin = B_i^H g - sum_{j != i} A_ij f_j and
/// E = (Sigma_s + Sigma_i)^* (x) I_{N_i}.
struct SensorSubproblem {
  Index i = 0;
  HermMat Q;
  CVec lin;
  HermMat E;
  double P = 0.0;
};

/// Reads block i out of the assembled joint QCQP at the stacked point f.
SensorSubproblem build_subproblem(const QcqpData& d, const CVec& f, Index i);

/// Same data from the model directly, without forming the joint QCQP:
/// Q = (Sigma_s + Sigma_i)^* (x) H_i^H G W G^H H_i and
/// lin = vec(H_i^H G W (I - G^H sum_{j != i} H_j F_j) Sigma_s).
SensorSubproblem build_subproblem(const NetworkModel& m, const WmmseState& s,
                                  const BeamformerSet& f, Index i);

double subproblem_objective(const SensorSubproblem& sp, const CVec& fi);

/// Change of variables x = E^{1/2} f_i: Q~ = E^{-1/2} Q E^{-1/2},
/// q~ = E^{-1/2} lin and rho = sqrt(P). Throws DomainError if E is not PD.
TrsProblem whiten_subproblem(const SensorSubproblem& sp);

struct SubproblemSolution {
  CVec f;
  /// Multiplier of the ball constraint in whitened coordinates.
  double mu = 0.0;
  TrsCase kind = TrsCase::MinNormInterior;
};

SubproblemSolution solve_subproblem_detailed(const SensorSubproblem& sp);

/// Minimizer f_i = E^{-1/2} x with x from solve_trs on the whitened problem.
CVec solve_subproblem(const SensorSubproblem& sp);

struct ScalarSubproblemSolution {
  CVec f;
  /// Multiplier of ||f_i||^2 <= P_i / (sigma_s^2 + sigma_i^2) for the
  /// subproblem divided by the scalar weight w.
  double mu = 0.0;
  bool boundary = false;
};

/// Closed-form minimizer for a scalar source (K = 1). `g` is the M x 1
/// postcoder; W only scales the subproblem and does not enter. Throws
/// DomainError if K != 1.
ScalarSubproblemSolution solve_subproblem_scalar_detailed(const NetworkModel& m, const CVec& g,
                                                          const BeamformerSet& f, Index i);

CVec solve_subproblem_scalar(const NetworkModel& m, const CVec& g, const BeamformerSet& f,
                             Index i);

/// Cyclic BCA: every outer loop visits sensors 0..L-1 in order; each visit
/// replaces F_i by its subproblem minimizer (closed form when K = 1) and then
/// refreshes G and W. Throws DomainError if f0 is infeasible and
/// NumericalError if any block update lowers the surrogate objective by more
/// than 1e-9 (1 + |value|).
BcaResult run_cyclic_bca(const NetworkModel& m, const BeamformerSet& f0,
                         const BcaOptions& opts = {});

}  // namespace sensorbf
