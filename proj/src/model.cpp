#include "sensorbf/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

std::string idx(Index i) { return std::to_string(i); }

}  // namespace

NetworkModel::NetworkModel(std::vector<CMat> channels, HermMat sigma_s,
                           std::vector<HermMat> sigma_i, double sigma0_sq,
                           std::vector<double> budgets)
    : channels_(std::move(channels)),
      sigma_s_(std::move(sigma_s)),
      sigma_i_(std::move(sigma_i)),
      sigma0_sq_(sigma0_sq),
      budgets_(std::move(budgets)) {
  const Index L = static_cast<Index>(channels_.size());
  if (L == 0) throw DimensionError("NetworkModel: at least one sensor is required");
  if (static_cast<Index>(sigma_i_.size()) != L || static_cast<Index>(budgets_.size()) != L)
    throw DimensionError("NetworkModel: H, Sigma_i and P must all have L entries");
  const Index K = sigma_s_.order();
  if (K == 0) throw DimensionError("NetworkModel: source dimension must be positive");
  const Index M = channels_[0].rows();
  if (M == 0) throw DimensionError("NetworkModel: FC antenna count must be positive");

  if (!(min_eig(sigma_s_) > 0))
    throw DomainError("NetworkModel: Sigma_s must be positive definite");
  if (!(sigma0_sq_ > 0) || !std::isfinite(sigma0_sq_))
    throw DomainError("NetworkModel: sigma0_sq must be positive");

  offsets_.assign(1, 0);
  for (Index i = 0; i < L; ++i) {
    const CMat& h = channels_[i];
    if (h.rows() != M || h.cols() == 0)
      throw DimensionError("NetworkModel: H_" + idx(i) + " must be M x N_i");
    if (!all_finite(h)) throw DomainError("NetworkModel: H_" + idx(i) + " not finite");
    if (sigma_i_[i].order() != K)
      throw DimensionError("NetworkModel: Sigma_" + idx(i) + " must be K x K");
    const double lo = min_eig(sigma_i_[i]);
    const double hi = std::max(max_eig(sigma_i_[i]), 0.0);
    if (lo < -kRankTol * std::max(hi, 1.0))
      throw DomainError("NetworkModel: Sigma_" + idx(i) + " must be PSD");
    if (!(budgets_[i] > 0) || !std::isfinite(budgets_[i]))
      throw DomainError("NetworkModel: P_" + idx(i) + " must be positive");
    n_.push_back(h.cols());
    offsets_.push_back(offsets_.back() + K * h.cols());
  }
}

HermMat NetworkModel::observation_covariance(Index i) const {
  return sigma_s_ + sigma_i_[i];
}

BeamformerSet BeamformerSet::zeros(const NetworkModel& m) {
  BeamformerSet f;
  for (Index i = 0; i < m.L(); ++i) f.F.push_back(CMat::Zero(m.N(i), m.K()));
  return f;
}

CVec BeamformerSet::stacked() const {
  Index n = 0;
  for (const auto& x : F) n += x.size();
  CVec out(n);
  Index off = 0;
  for (const auto& x : F) {
    out.segment(off, x.size()) = vec(x);
    off += x.size();
  }
  return out;
}

BeamformerSet BeamformerSet::from_stacked(const NetworkModel& m, const CVec& f) {
  if (f.size() != m.stacked_size())
    throw DimensionError("BeamformerSet::from_stacked: length mismatch");
  BeamformerSet out;
  for (Index i = 0; i < m.L(); ++i)
    out.F.push_back(unvec(f.segment(m.block_offset(i), m.K() * m.N(i)), m.N(i), m.K()));
  return out;
}

void check_conforms(const NetworkModel& m, const BeamformerSet& f) {
  if (static_cast<Index>(f.F.size()) != m.L())
    throw DimensionError("beamformer count " + std::to_string(f.F.size()) +
                         " does not match L = " + idx(m.L()));
  for (Index i = 0; i < m.L(); ++i) {
    if (f.F[i].rows() != m.N(i) || f.F[i].cols() != m.K())
      throw DimensionError("F_" + idx(i) + " must be " + idx(m.N(i)) + "x" + idx(m.K()));
    if (!all_finite(f.F[i])) throw DimensionError("F_" + idx(i) + " has non-finite entries");
  }
}

CMat effective_channel(const NetworkModel& m, const BeamformerSet& f) {
  check_conforms(m, f);
  CMat h = CMat::Zero(m.M(), m.K());
  for (Index i = 0; i < m.L(); ++i) h.noalias() += m.channel(i) * f.F[i];
  return h;
}

HermMat noise_covariance(const NetworkModel& m, const BeamformerSet& f) {
  check_conforms(m, f);
  CMat s = m.sigma0_sq() * CMat::Identity(m.M(), m.M());
  for (Index i = 0; i < m.L(); ++i) {
    const CMat hf = m.channel(i) * f.F[i];
    s.noalias() += hf * m.sigma_i(i).mat() * hf.adjoint();
  }
  return HermMat::symmetrized(s);
}

double mutual_information(const CMat& heff, const HermMat& sigma_s,
                          const HermMat& sigma_n) {
  // I + L^{-1} H Sigma_s H^H L^{-H} with Sigma_n = L L^H is similar to
  // I + H Sigma_s H^H Sigma_n^{-1} and is PD.
  Eigen::LLT<CMat> llt(sigma_n.mat());
  if (llt.info() != Eigen::Success)
    throw NumericalError("mutual_information: noise covariance is singular");
  const CMat x = llt.matrixL().solve(heff * sigma_s.mat() * heff.adjoint());
  const CMat y = llt.matrixL().solve(x.adjoint());
  const HermMat t = HermMat::symmetrized(CMat::Identity(heff.rows(), heff.rows()) + y);
  return std::max(log_det_pd(t), 0.0);
}

double mutual_information(const NetworkModel& m, const BeamformerSet& f) {
  return mutual_information(effective_channel(m, f), m.sigma_s(), noise_covariance(m, f));
}

double transmit_power(const NetworkModel& m, const BeamformerSet& f, Index i) {
  if (i < 0 || i >= m.L())
    throw PreconditionError("transmit_power: sensor index " + idx(i) + " out of range");
  check_conforms(m, f);
  const CMat& fi = f.F[i];
  return (fi * m.observation_covariance(i).mat() * fi.adjoint()).trace().real();
}

bool is_feasible(const NetworkModel& m, const BeamformerSet& f, double slack) {
  if (!(slack >= 0)) throw PreconditionError("is_feasible: slack must be >= 0");
  for (Index i = 0; i < m.L(); ++i)
    if (transmit_power(m, f, i) > m.budget(i) * (1.0 + slack)) return false;
  return true;
}

NetworkModel whiten_receiver_noise(const NetworkModel& m, const HermMat& sigma0) {
  if (sigma0.order() != m.M())
    throw DimensionError("whiten_receiver_noise: Sigma0 must be M x M");
  const HermMat w = inv_sqrt_pd(sigma0);
  std::vector<CMat> h;
  for (Index i = 0; i < m.L(); ++i) h.push_back(w.mat() * m.channel(i));
  return NetworkModel(std::move(h), m.sigma_s(), m.sensing_noise(), 1.0, m.budgets());
}

}  // namespace sensorbf
