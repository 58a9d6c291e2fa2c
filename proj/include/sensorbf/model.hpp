#pragma once

#include <vector>

#include "sensorbf/linalg.hpp"

namespace sensorbf {

/// Parameters of a coherent-MAC sensor network.
///
/// L sensors observe a K-dimensional Gaussian source s ~ CN(0, Sigma_s) through
/// independent sensing noise n_i ~ CN(0, Sigma_i). Sensor i (N_i antennas)
/// transmits F_i (s + n_i) over the M x N_i channel H_i; the fusion center
/// (M antennas) sees the coherent sum plus receiver noise CN(0, sigma0_sq I).
///
/// Sensor indices are zero-based throughout the library.
class NetworkModel {
 public:
  /// Validates every invariant; throws DimensionError on inconsistent shapes
  /// and DomainError on non-PD Sigma_s, non-PSD Sigma_i or non-positive
  /// sigma0_sq / budgets.
  NetworkModel(std::vector<CMat> channels, HermMat sigma_s,
               std::vector<HermMat> sigma_i, double sigma0_sq,
               std::vector<double> budgets);

  Index K() const { return sigma_s_.order(); }
  Index L() const { return static_cast<Index>(channels_.size()); }
  Index M() const { return channels_.front().rows(); }
  Index N(Index i) const { return channels_[i].cols(); }
  const std::vector<Index>& antenna_counts() const { return n_; }

  const CMat& channel(Index i) const { return channels_[i]; }
  const std::vector<CMat>& channels() const { return channels_; }
  const HermMat& sigma_s() const { return sigma_s_; }
  const HermMat& sigma_i(Index i) const { return sigma_i_[i]; }
  const std::vector<HermMat>& sensing_noise() const { return sigma_i_; }
  double sigma0_sq() const { return sigma0_sq_; }
  double budget(Index i) const { return budgets_[i]; }
  const std::vector<double>& budgets() const { return budgets_; }

  /// Sigma_s + Sigma_i, the covariance of what sensor i transmits per unit F_i.
  HermMat observation_covariance(Index i) const;

  /// Offset of vec(F_i) inside the stacked vector f = [vec(F_1); ...; vec(F_L)].
  Index block_offset(Index i) const { return offsets_[i]; }

  /// K * sum_i N_i, the length of the stacked beamformer vector.
  Index stacked_size() const { return offsets_.back(); }

 private:
  std::vector<CMat> channels_;
  HermMat sigma_s_;
  std::vector<HermMat> sigma_i_;
  double sigma0_sq_;
  std::vector<double> budgets_;
  std::vector<Index> n_;
  std::vector<Index> offsets_;
};

/// The precoders {F_i}, F_i in C^{N_i x K}.
struct BeamformerSet {
  std::vector<CMat> F;

  static BeamformerSet zeros(const NetworkModel& m);

  /// Stacks [vec(F_1); ...; vec(F_L)].
  CVec stacked() const;
  static BeamformerSet from_stacked(const NetworkModel& m, const CVec& f);
};

/// Throws DimensionError unless `f` has L blocks shaped N_i x K with finite entries.
void check_conforms(const NetworkModel& m, const BeamformerSet& f);

/// H~ = sum_i H_i F_i (M x K).
CMat effective_channel(const NetworkModel& m, const BeamformerSet& f);

/// Sigma_n = sigma0^2 I_M + sum_i H_i F_i Sigma_i F_i^H H_i^H.
HermMat noise_covariance(const NetworkModel& m, const BeamformerSet& f);

/// log det(I_M + H~ Sigma_s H~^H Sigma_n^{-1}) in nats.
double mutual_information(const NetworkModel& m, const BeamformerSet& f);

/// Same quantity from precomputed H~ and Sigma_n.
double mutual_information(const CMat& heff, const HermMat& sigma_s,
                          const HermMat& sigma_n);

/// Tr{F_i (Sigma_s + Sigma_i) F_i^H}. Throws PreconditionError if i is out of range.
double transmit_power(const NetworkModel& m, const BeamformerSet& f, Index i);

inline constexpr double kFeasibilitySlack = 1e-8;

/// True iff every sensor satisfies transmit_power <= P_i (1 + slack).
bool is_feasible(const NetworkModel& m, const BeamformerSet& f,
                 double slack = kFeasibilitySlack);

/// Equivalent model for colored receiver noise CN(0, sigma0): channels become
/// sigma0^{-1/2} H_i and the receiver noise power becomes 1. The input model's
/// own sigma0_sq is replaced. Throws DomainError when sigma0 is not PD.
NetworkModel whiten_receiver_noise(const NetworkModel& m, const HermMat& sigma0);

}  // namespace sensorbf
