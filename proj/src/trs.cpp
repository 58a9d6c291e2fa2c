#include "sensorbf/trs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

constexpr double kNullComponentTol = 1e-9;  // |p_k| <= tol * ||q|| on N(Q)
constexpr double kSecularResidualTol = 1e-10;
constexpr int kMaxBisection = 200;
constexpr int kMaxNewtonPolish = 6;

void check_shape(const TrsProblem& prob) {
  if (prob.Q.order() != prob.q.size())
    throw DimensionError("TrsProblem: Q is " + std::to_string(prob.Q.order()) +
                         "x" + std::to_string(prob.Q.order()) + " but q has length " +
                         std::to_string(prob.q.size()));
  if (!(prob.rho > 0) || !std::isfinite(prob.rho))
    throw PreconditionError("TrsProblem: rho must be positive and finite");
  if (!all_finite(prob.q)) throw PreconditionError("TrsProblem: q has non-finite entries");
}

void check_psd(const RVec& descending) {
  if (descending.size() == 0) return;
  const double top = std::max(descending(0), 0.0);
  const double low = descending(descending.size() - 1);
  if (low < -kRankTol * top)
    throw DomainError("TrsProblem: Q is indefinite (min eigenvalue " + std::to_string(low) +
                      ", max " + std::to_string(top) + ")");
}

// f(0+) including the +inf limit at zero eigenvalues.
double secular_limit_at_zero(const RVec& lambdas, const CVec& p) {
  double s = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    const double a = std::norm(p(k));
    if (a == 0.0) continue;
    if (lambdas(k) <= 0.0) return std::numeric_limits<double>::infinity();
    s += a / (lambdas(k) * lambdas(k));
  }
  return s;
}

// d f / d mu.
double secular_slope(const RVec& lambdas, const CVec& p, double mu) {
  double s = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    const double d = lambdas(k) + mu;
    s -= 2.0 * std::norm(p(k)) / (d * d * d);
  }
  return s;
}

}  // namespace

std::string_view to_string(TrsCase c) {
  switch (c) {
    case TrsCase::MinNormInterior:
      return "MinNormInterior";
    case TrsCase::BoundaryUnique:
      return "BoundaryUnique";
  }
  return "?";
}

void validate(const TrsProblem& prob) {
  check_shape(prob);
  Eigen::SelfAdjointEigenSolver<CMat> es(prob.Q.mat(), Eigen::EigenvaluesOnly);
  check_psd(es.eigenvalues().reverse());
}

double trs_objective(const TrsProblem& prob, const CVec& x) {
  return x.dot(prob.Q.mat() * x).real() - 2.0 * prob.q.dot(x).real();
}

double secular_value(const RVec& lambdas, const CVec& p, double mu) {
  if (lambdas.size() != p.size()) throw DimensionError("secular_value: size mismatch");
  double s = 0.0;
  for (Index k = 0; k < p.size(); ++k) {
    const double a = std::norm(p(k));
    if (a == 0.0) continue;
    const double d = lambdas(k) + mu;
    if (!(d > 0.0))
      throw DomainError("secular_value: pole at index " + std::to_string(k));
    s += a / (d * d);
  }
  return s;
}

double solve_secular(const RVec& lambdas, const CVec& p, double rho) {
  if (!(rho > 0)) throw PreconditionError("solve_secular: rho must be positive");
  const double target = rho * rho;
  if (!(secular_limit_at_zero(lambdas, p) > target))
    throw PreconditionError("solve_secular: f(0+) <= rho^2, the interior branch applies");

  // With every lambda_k >= 0, f(mu) <= ||p||^2 / mu^2, so ||p||/rho brackets
  // the root from above; keep doubling in case of slightly negative lambdas.
  double hi = std::max(p.norm() / rho, std::numeric_limits<double>::min());
  for (int grow = 0; grow < kMaxBisection && secular_value(lambdas, p, hi) >= target; ++grow)
    hi *= 2.0;
  double lo = 0.0;

  auto residual = [&](double mu) { return std::abs(secular_value(lambdas, p, mu) - target); };

  double best = hi;
  double best_res = residual(hi);
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = secular_value(lambdas, p, mid);
    const double res = std::abs(fm - target);
    if (res < best_res) {
      best = mid;
      best_res = res;
    }
    if (res <= kSecularResidualTol * target) break;
    (fm > target ? lo : hi) = mid;
  }

  // Newton on phi(mu) = 1/sqrt(f) - 1/rho, which is nearly linear in mu;
  // steps leaving the bracket or failing to reduce the residual are rejected.
  double mu = best;
  for (int it = 0; it < kMaxNewtonPolish && best_res > 0.0; ++it) {
    const double f = secular_value(lambdas, p, mu);
    const double phi = 1.0 / std::sqrt(f) - 1.0 / rho;
    const double dphi = -0.5 * std::pow(f, -1.5) * secular_slope(lambdas, p, mu);
    if (!(dphi > 0.0)) break;
    const double next = mu - phi / dphi;
    if (!(next > lo && next < hi)) break;
    const double res = residual(next);
    if (!(res < best_res)) break;
    mu = next;
    best = next;
    best_res = res;
  }
  return best;
}

TrsSolution solve_trs(const TrsProblem& prob) {
  check_shape(prob);
  const Index n = prob.q.size();
  TrsSolution sol;
  const double qnorm = prob.q.norm();
  if (qnorm == 0.0) {
    Eigen::SelfAdjointEigenSolver<CMat> es(prob.Q.mat(), Eigen::EigenvaluesOnly);
    check_psd(es.eigenvalues().reverse());
    sol.x = CVec::Zero(n);
    return sol;
  }

  const EigDecomp d = herm_eig(prob.Q);
  check_psd(d.lambdas);
  const double top = n ? std::max(d.lambdas(0), 0.0) : 0.0;
  const double cut = kRankTol * top;
  Index rank = 0;
  while (rank < n && d.lambdas(rank) > cut && d.lambdas(rank) > 0.0) ++rank;

  const CVec p = d.U.adjoint() * prob.q;
  bool orthogonal_to_null = true;
  for (Index k = rank; k < n; ++k)
    if (std::abs(p(k)) > kNullComponentTol * qnorm) orthogonal_to_null = false;
  double range_norm_sq = 0.0;
  for (Index k = 0; k < rank; ++k)
    range_norm_sq += std::norm(p(k)) / (d.lambdas(k) * d.lambdas(k));

  const double rho_sq = prob.rho * prob.rho;
  if (orthogonal_to_null && range_norm_sq <= rho_sq) {
    const CVec coeff = p.head(rank).cwiseQuotient(d.lambdas.head(rank).cast<Complex>());
    sol.x = d.U.leftCols(rank) * coeff;
    sol.mu = 0.0;
    sol.kind = TrsCase::MinNormInterior;
  } else {
    RVec lam = RVec::Zero(n);
    lam.head(rank) = d.lambdas.head(rank);
    sol.mu = solve_secular(lam, p, prob.rho);
    const RVec denom = (lam.array() + sol.mu).matrix();
    sol.x = d.U * p.cwiseQuotient(denom.cast<Complex>());
    sol.kind = TrsCase::BoundaryUnique;
  }
  sol.kkt_residual = (prob.Q.mat() * sol.x + sol.mu * sol.x - prob.q).norm();
  return sol;
}

}  // namespace sensorbf
