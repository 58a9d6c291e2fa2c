#include "sensorbf/wmmse.hpp"

#include <algorithm>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

void check_postcoder(const NetworkModel& m, const CMat& G) {
  if (G.rows() != m.M() || G.cols() != m.K())
    throw DimensionError("postcoder G must be M x K");
}

}  // namespace

HermMat mse_matrix(const CMat& heff, const HermMat& sigma_n, const HermMat& sigma_s,
                   const CMat& G) {
  const Index K = sigma_s.order();
  if (heff.cols() != K || G.cols() != K || G.rows() != heff.rows() ||
      sigma_n.order() != heff.rows())
    throw DimensionError("mse_matrix: inconsistent shapes");
  const CMat r = CMat::Identity(K, K) - G.adjoint() * heff;
  return HermMat::symmetrized(r * sigma_s.mat() * r.adjoint() +
                              G.adjoint() * sigma_n.mat() * G);
}

HermMat mse_matrix(const NetworkModel& m, const BeamformerSet& f, const CMat& G) {
  check_postcoder(m, G);
  return mse_matrix(effective_channel(m, f), noise_covariance(m, f), m.sigma_s(), G);
}

CMat update_G(const CMat& heff, const HermMat& sigma_n, const HermMat& sigma_s) {
  const CMat hs = heff * sigma_s.mat();
  return solve_pd(HermMat::symmetrized(hs * heff.adjoint()) + sigma_n, hs);
}

CMat update_G(const NetworkModel& m, const BeamformerSet& f) {
  return update_G(effective_channel(m, f), noise_covariance(m, f), m.sigma_s());
}

HermMat update_W(const NetworkModel& m, const BeamformerSet& f, const CMat& G) {
  return update_W(mse_matrix(m, f, G));
}

HermMat update_W(HermMat e) {
  const double top = max_eig(e);
  const double floor = 1e-12 * top;
  if (min_eig(e) < floor)
    e = e + HermMat::identity(e.order()) * floor;
  try {
    return inverse_pd(e);
  } catch (const NumericalError&) {
    throw NumericalError("update_W: MSE matrix is numerically singular");
  }
}

WmmseState closed_form_state(const NetworkModel& m, const BeamformerSet& f) {
  WmmseState s;
  s.G = update_G(m, f);
  s.W = update_W(m, f, s.G);
  return s;
}

double weighted_mse(const NetworkModel& m, const BeamformerSet& f, const WmmseState& s) {
  if (s.W.order() != m.K()) throw DimensionError("weight W must be K x K");
  return (s.W.mat() * mse_matrix(m, f, s.G).mat()).trace().real();
}

double surrogate_objective(const NetworkModel& m, const BeamformerSet& f,
                           const WmmseState& s) {
  return log_det_pd(s.W) - weighted_mse(m, f, s) + static_cast<double>(m.K()) +
         log_det_pd(m.sigma_s());
}

}  // namespace sensorbf
