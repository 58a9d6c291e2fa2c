#include "sensorbf/cyclic_bca.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kSurrogateSlack = 1e-9;

void check_sensor(Index i, Index L, const char* who) {
  if (i < 0 || i >= L)
    throw PreconditionError(std::string(who) + ": sensor index " + std::to_string(i) +
                            " out of range");
}

void check_sub(const SensorSubproblem& sp) {
  const Index n = sp.Q.order();
  if (sp.lin.size() != n || sp.E.order() != n)
    throw DimensionError("SensorSubproblem: Q, lin and E must have the same order");
  if (!(sp.P > 0)) throw PreconditionError("SensorSubproblem: P must be positive");
}

void require_no_drop(double before, double after, const char* step, Index i) {
  if (after < before - kSurrogateSlack * (1.0 + std::abs(before)))
    throw NumericalError(std::string("run_cyclic_bca: ") + step + " update of sensor " +
                         std::to_string(i) + " decreased the surrogate from " +
                         std::to_string(before) + " to " + std::to_string(after));
}

// `others` is sum_{j != i} H_j F_j.
SensorSubproblem subproblem_from_parts(const NetworkModel& m, const WmmseState& s,
                                       const CMat& others, Index i) {
  const Index K = m.K(), n = m.N(i);
  const CMat& h = m.channel(i);
  const CMat hgw = h.adjoint() * s.G * s.W.mat();
  const CMat t = hgw * s.G.adjoint() * h;
  const CMat obs = m.observation_covariance(i).mat().conjugate();

  SensorSubproblem sp;
  sp.i = i;
  sp.Q = HermMat::symmetrized(kron(obs, t));
  sp.lin = vec(hgw * (CMat::Identity(K, K) - s.G.adjoint() * others) * m.sigma_s().mat());
  sp.E = HermMat::symmetrized(kron(obs, CMat::Identity(n, n)));
  sp.P = m.budget(i);
  return sp;
}

ScalarSubproblemSolution scalar_from_parts(const NetworkModel& m, const CVec& g,
                                           const CVec& others, Index i) {
  const double ss = m.sigma_s().mat()(0, 0).real();
  const double c = ss + m.sigma_i(i).mat()(0, 0).real();
  const double pbar = m.budget(i) / c;
  const CVec h = m.channel(i).adjoint() * g;
  const Complex a = 1.0 - g.dot(others);
  const double hn2 = h.squaredNorm();

  ScalarSubproblemSolution out;
  if (hn2 == 0.0) {
    out.f = CVec::Zero(m.N(i));
    return out;
  }
  const double hn = std::sqrt(hn2);
  if (ss * ss * std::norm(a) > c * c * pbar * hn2) {
    out.boundary = true;
    out.mu = ss * std::abs(a) * hn / std::sqrt(pbar) - c * hn2;
    // Sherman-Morrison: (mu I + c h h^H)^{-1} h = h / (mu + c ||h||^2).
    out.f = (ss * a / (out.mu + c * hn2)) * h;
  } else {
    out.f = (ss * a / (c * hn2)) * h;
  }
  return out;
}

// H~ and Sigma_n kept in sync with single-sensor replacements.
class CoupledTerms {
 public:
  CoupledTerms(const NetworkModel& m, const BeamformerSet& f) : m_(m) { refresh(f); }

  void refresh(const BeamformerSet& f) {
    hf_.clear();
    heff_ = CMat::Zero(m_.M(), m_.K());
    CMat n = m_.sigma0_sq() * CMat::Identity(m_.M(), m_.M());
    for (Index i = 0; i < m_.L(); ++i) {
      hf_.push_back(m_.channel(i) * f.F[i]);
      heff_ += hf_.back();
      n.noalias() += hf_.back() * m_.sigma_i(i).mat() * hf_.back().adjoint();
    }
    noise_ = HermMat::symmetrized(n);
  }

  void replace(Index i, const CMat& fi) {
    const CMat next = m_.channel(i) * fi;
    const CMat& prev = hf_[i];
    heff_ += next - prev;
    const CMat& si = m_.sigma_i(i).mat();
    noise_ = HermMat::symmetrized(noise_.mat() + next * si * next.adjoint() -
                                  prev * si * prev.adjoint());
    hf_[i] = next;
  }

  const CMat& heff() const { return heff_; }
  const HermMat& noise() const { return noise_; }
  CMat others(Index i) const { return heff_ - hf_[i]; }

  double surrogate(const WmmseState& s) const {
    const HermMat e = mse_matrix(heff_, noise_, m_.sigma_s(), s.G);
    return log_det_pd(s.W) - (s.W.mat() * e.mat()).trace().real() +
           static_cast<double>(m_.K()) + log_det_pd(m_.sigma_s());
  }

 private:
  const NetworkModel& m_;
  std::vector<CMat> hf_;
  CMat heff_;
  HermMat noise_;
};

}  // namespace

SensorSubproblem build_subproblem(const QcqpData& d, const CVec& f, Index i) {
  check_sensor(i, d.blocks(), "build_subproblem");
  if (f.size() != d.size()) throw DimensionError("build_subproblem: vector length mismatch");
  const Index o = d.offsets[i], k = d.block_size(i);
  SensorSubproblem sp;
  sp.i = i;
  sp.Q = HermMat::symmetrized(d.A.mat().block(o, o, k, k) + d.C_blocks[i].mat());
  CVec qi = d.A.mat().middleRows(o, k) * f;
  qi.noalias() -= d.A.mat().block(o, o, k, k) * f.segment(o, k);
  sp.lin = d.B.middleCols(o, k).adjoint() * d.g - qi;
  sp.E = d.D_blocks[i];
  sp.P = d.P[i];
  return sp;
}

SensorSubproblem build_subproblem(const NetworkModel& m, const WmmseState& s,
                                  const BeamformerSet& f, Index i) {
  check_sensor(i, m.L(), "build_subproblem");
  check_conforms(m, f);
  return subproblem_from_parts(m, s, effective_channel(m, f) - m.channel(i) * f.F[i], i);
}

double subproblem_objective(const SensorSubproblem& sp, const CVec& fi) {
  check_sub(sp);
  if (fi.size() != sp.lin.size()) throw DimensionError("subproblem_objective: length mismatch");
  return fi.dot(sp.Q.mat() * fi).real() - 2.0 * sp.lin.dot(fi).real();
}

TrsProblem whiten_subproblem(const SensorSubproblem& sp) {
  check_sub(sp);
  const HermMat t = inv_sqrt_pd(sp.E);
  TrsProblem p;
  p.Q = HermMat::symmetrized(t.mat() * sp.Q.mat() * t.mat());
  p.q = t.mat() * sp.lin;
  p.rho = std::sqrt(sp.P);
  return p;
}

SubproblemSolution solve_subproblem_detailed(const SensorSubproblem& sp) {
  const TrsProblem p = whiten_subproblem(sp);
  const TrsSolution s = solve_trs(p);
  SubproblemSolution out;
  out.f = inv_sqrt_pd(sp.E).mat() * s.x;
  out.mu = s.mu;
  out.kind = s.kind;
  return out;
}

CVec solve_subproblem(const SensorSubproblem& sp) { return solve_subproblem_detailed(sp).f; }

ScalarSubproblemSolution solve_subproblem_scalar_detailed(const NetworkModel& m, const CVec& g,
                                                          const BeamformerSet& f, Index i) {
  if (m.K() != 1) throw DomainError("solve_subproblem_scalar: requires a scalar source (K = 1)");
  check_sensor(i, m.L(), "solve_subproblem_scalar");
  check_conforms(m, f);
  if (g.size() != m.M()) throw DimensionError("solve_subproblem_scalar: g must have length M");

  CVec others = CVec::Zero(m.M());
  for (Index j = 0; j < m.L(); ++j)
    if (j != i) others.noalias() += m.channel(j) * f.F[j].col(0);
  return scalar_from_parts(m, g, others, i);
}

CVec solve_subproblem_scalar(const NetworkModel& m, const CVec& g, const BeamformerSet& f,
                             Index i) {
  return solve_subproblem_scalar_detailed(m, g, f, i).f;
}

BcaResult run_cyclic_bca(const NetworkModel& m, const BeamformerSet& f0, const BcaOptions& opts) {
  check_conforms(m, f0);
  if (!is_feasible(m, f0)) throw DomainError("run_cyclic_bca: initial beamformers are infeasible");
  if (opts.max_outer < 0) throw PreconditionError("run_cyclic_bca: max_outer must be >= 0");

  BcaResult res;
  res.F = f0;
  res.state = closed_form_state(m, f0);
  res.trace.algorithm = Algorithm::Cyclic;
  res.trace.mi.push_back(mutual_information(m, f0));
  res.trace.wall_s.push_back(0.0);
  const bool scalar = m.K() == 1;

  CoupledTerms terms(m, res.F);
  for (int j = 0; j < opts.max_outer; ++j) {
    const auto t0 = Clock::now();
    terms.refresh(res.F);
    double value = terms.surrogate(res.state);
    for (Index i = 0; i < m.L(); ++i) {
      const CMat others = terms.others(i);
      CVec fi = scalar ? scalar_from_parts(m, res.state.G.col(0), others.col(0), i).f
                       : solve_subproblem(subproblem_from_parts(m, res.state, others, i));
      res.F.F[i] = unvec(fi, m.N(i), m.K());
      terms.replace(i, res.F.F[i]);
      double next = terms.surrogate(res.state);
      require_no_drop(value, next, "precoder", i);
      value = next;
      res.state.G = update_G(terms.heff(), terms.noise(), m.sigma_s());
      next = terms.surrogate(res.state);
      require_no_drop(value, next, "postcoder", i);
      value = next;
      res.state.W = update_W(mse_matrix(terms.heff(), terms.noise(), m.sigma_s(), res.state.G));
      next = terms.surrogate(res.state);
      require_no_drop(value, next, "weight", i);
      value = next;
    }
    const double mi = mutual_information(m, res.F);
    res.trace.wall_s.push_back(
        opts.record_timing ? std::chrono::duration<double>(Clock::now() - t0).count() : 0.0);
    const double gain = mi - res.trace.mi.back();
    res.trace.mi.push_back(mi);
    if (gain < opts.mi_tol) break;
  }
  if (opts.compute_kkt) res.trace.kkt = kkt_residual_p0(m, res.F, res.state);
  return res;
}

}  // namespace sensorbf
