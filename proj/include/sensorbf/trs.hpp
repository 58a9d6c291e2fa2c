#pragma once

#include <string_view>

#include "sensorbf/linalg.hpp"

namespace sensorbf {

/// Convex trust-region subproblem
///
///     minimize   x^H Q x - 2 Re{q^H x}
///     subject to ||x||_2 <= rho
///
/// with Q Hermitian positive semidefinite.
struct TrsProblem {
  HermMat Q;
  CVec q;
  double rho = 1.0;
};

enum class TrsCase {
  /// mu = 0 and x = Q^+ q, the least-norm minimizer.
  MinNormInterior,
  /// mu > 0 solves the secular equation; the minimizer is unique and ||x|| = rho.
  BoundaryUnique,
};

std::string_view to_string(TrsCase c);

/// Certified solution: x, the multiplier mu of ||x||^2 <= rho^2, the branch
/// taken and the stationarity residual ||(Q + mu I) x - q||_2.
struct TrsSolution {
  CVec x;
  double mu = 0.0;
  TrsCase kind = TrsCase::MinNormInterior;
  double kkt_residual = 0.0;
};

/// Throws PreconditionError/DomainError when Q is not PSD within
/// kRankTol * maxeig, rho <= 0 or q has the wrong length or non-finite entries.
void validate(const TrsProblem& prob);

double trs_objective(const TrsProblem& prob, const CVec& x);

/// f(mu) = sum_k |p_k|^2 / (lambda_k + mu)^2. Returns +inf at mu = 0 when a
/// zero eigenvalue carries a nonzero p_k; throws DomainError at any other pole.
double secular_value(const RVec& lambdas, const CVec& p, double mu);

/// Positive root of f(mu) = rho^2 found by bracketed bisection on [0, mu_hi]
/// followed by safeguarded Newton steps on 1/sqrt(f) - 1/rho. Requires
/// lim_{mu -> 0+} f(mu) > rho^2 (PreconditionError otherwise: the
/// interior branch applies).
double solve_secular(const RVec& lambdas, const CVec& p, double rho);

/// Exact solver: one Hermitian eigendecomposition, then either the
/// pseudoinverse solution or the secular-equation solution.
TrsSolution solve_trs(const TrsProblem& prob);

}  // namespace sensorbf
