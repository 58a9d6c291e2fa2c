#include "sensorbf/kkt.hpp"

#include <algorithm>
#include <string>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

void check_index(const NetworkModel& m, Index i, const char* who) {
  if (i < 0 || i >= m.L())
    throw PreconditionError(std::string(who) + ": sensor index " + std::to_string(i) +
                            " out of range");
}

double relative_gap(const CMat& lhs, const CMat& rhs) {
  const double scale = std::max(lhs.norm(), rhs.norm());
  if (scale == 0.0) return 0.0;
  return (lhs - rhs).norm() / scale;
}

}  // namespace

CMat mi_gradient(const NetworkModel& m, const BeamformerSet& f, Index i) {
  check_index(m, i, "mi_gradient");
  const CMat heff = effective_channel(m, f);
  const HermMat sn = noise_covariance(m, f);
  const HermMat r = HermMat::symmetrized(heff * m.sigma_s().mat() * heff.adjoint()) + sn;
  const CMat& h = m.channel(i);
  const CMat inner = CMat::Identity(m.K(), m.K()) -
                     heff.adjoint() * solve_pd(sn, h * f.F[i] * m.sigma_i(i).mat());
  return h.adjoint() * solve_pd(r, heff * m.sigma_s().mat()) * inner;
}

CMat weighted_mse_gradient(const NetworkModel& m, const BeamformerSet& f,
                           const WmmseState& s, Index i) {
  check_index(m, i, "weighted_mse_gradient");
  if (s.G.rows() != m.M() || s.G.cols() != m.K() || s.W.order() != m.K())
    throw DimensionError("weighted_mse_gradient: W must be K x K and G M x K");
  const CMat heff = effective_channel(m, f);
  const CMat& h = m.channel(i);
  const CMat hg = h.adjoint() * s.G;
  const CMat gw = hg * s.W.mat();
  const CMat resid = CMat::Identity(m.K(), m.K()) - s.G.adjoint() * heff;
  return -gw * resid * m.sigma_s().mat() +
         gw * hg.adjoint() * f.F[i] * m.sigma_i(i).mat();
}

KktReport kkt_residual_p0(const NetworkModel& m, const BeamformerSet& f, const WmmseState& s) {
  check_conforms(m, f);
  KktReport rep;
  for (Index i = 0; i < m.L(); ++i) {
    const CMat grad = -weighted_mse_gradient(m, f, s, i);
    const CMat x = f.F[i] * m.observation_covariance(i).mat();
    const double power = transmit_power(m, f, i);
    const double budget = m.budget(i);
    double lambda = 0.0;
    const double xx = x.squaredNorm();
    if (power >= budget * (1.0 - kActiveTol) && xx > 0.0)
      lambda = std::max(0.0, (x.array().conjugate() * grad.array()).sum().real() / xx);
    rep.multipliers.push_back(lambda);
    rep.stationarity.push_back((grad - lambda * x).norm() / (1.0 + grad.norm()));
    rep.complementarity.push_back(std::abs(lambda * (power - budget)));
    rep.feasibility.push_back(std::max(0.0, power - budget) / budget);
  }
  for (const auto* v : {&rep.stationarity, &rep.complementarity, &rep.feasibility})
    for (double r : *v) rep.max_residual = std::max(rep.max_residual, r);
  return rep;
}

KktReport kkt_residual_p0(const NetworkModel& m, const BeamformerSet& f) {
  return kkt_residual_p0(m, f, closed_form_state(m, f));
}

IdentityReport identity_residuals(const NetworkModel& m, const BeamformerSet& f) {
  const WmmseState s = closed_form_state(m, f);
  const CMat heff = effective_channel(m, f);
  const HermMat sn = noise_covariance(m, f);
  const CMat hsh = heff * m.sigma_s().mat() * heff.adjoint();
  const HermMat r = HermMat::symmetrized(hsh) + sn;
  const CMat gw = s.G * s.W.mat();

  IdentityReport rep;
  const CMat lhs1 = gw * (CMat::Identity(m.K(), m.K()) - s.G.adjoint() * heff);
  rep.postcoder_residual = relative_gap(lhs1, solve_pd(r, heff));
  const CMat lhs2 = gw * s.G.adjoint();
  // Sigma_n^{-1} on the right: (hsh Sigma_n^{-1}) = (Sigma_n^{-1} hsh)^H.
  const CMat right = solve_pd(sn, hsh).adjoint();
  rep.weighted_gram_residual = relative_gap(lhs2, solve_pd(r, right));
  return rep;
}

bool verify_identities(const NetworkModel& m, const BeamformerSet& f, double tol) {
  const IdentityReport rep = identity_residuals(m, f);
  return rep.postcoder_residual <= tol && rep.weighted_gram_residual <= tol;
}

}  // namespace sensorbf
