#pragma once

#include <vector>

#include "sensorbf/model.hpp"
#include "sensorbf/wmmse.hpp"

namespace sensorbf {

/// First-order certificate for max MI(f) s.t. Tr{F_i (Sigma_s + Sigma_i) F_i^H} <= P_i.
struct KktReport {
  /// ||grad_i - lambda_i F_i (Sigma_s + Sigma_i)||_F / (1 + ||grad_i||_F) per sensor.
  std::vector<double> stationarity;
  /// Recovered lambda_i >= 0.
  std::vector<double> multipliers;
  /// |lambda_i (power_i - P_i)|.
  std::vector<double> complementarity;
  /// max(0, power_i - P_i) / P_i.
  std::vector<double> feasibility;
  double max_residual = 0.0;
};

/// dMI/dF_i^* (Wirtinger convention, dMI = 2 Re Tr{grad^H dF_i}):
/// H_i^H (Sigma_n + H~ Sigma_s H~^H)^{-1} H~ Sigma_s (I - H~^H Sigma_n^{-1} H_i F_i Sigma_i).
CMat mi_gradient(const NetworkModel& m, const BeamformerSet& f, Index i);

/// d Tr{W E(G)} / dF_i^* with W and G held fixed:
/// -H_i^H G W (I - G^H H~) Sigma_s + H_i^H G W G^H H_i F_i Sigma_i.
CMat weighted_mse_gradient(const NetworkModel& m, const BeamformerSet& f,
                           const WmmseState& s, Index i);

/// Constraints with power_i >= P_i (1 - kActiveTol) count as active.
inline constexpr double kActiveTol = 1e-6;

/// KKT residuals with the ascent direction -weighted_mse_gradient(s). At the
/// closed-form (W, G) of f this direction equals mi_gradient. Multipliers come
/// from a nonnegative least-squares fit on active constraints.
KktReport kkt_residual_p0(const NetworkModel& m, const BeamformerSet& f, const WmmseState& s);

/// Same report with (W, G) = closed_form_state(m, f).
KktReport kkt_residual_p0(const NetworkModel& m, const BeamformerSet& f);

/// Residuals of the two closed-form identities at (G, W) = closed_form_state(f),
/// with R = H~ Sigma_s H~^H + Sigma_n:
///   G W (I - G^H H~) = R^{-1} H~
///   G W G^H          = R^{-1} H~ Sigma_s H~^H Sigma_n^{-1}
/// Each residual is ||lhs - rhs||_F / max(||lhs||_F, ||rhs||_F), or 0 when
/// both sides vanish.
struct IdentityReport {
  double postcoder_residual = 0.0;
  double weighted_gram_residual = 0.0;
};

IdentityReport identity_residuals(const NetworkModel& m, const BeamformerSet& f);

/// True iff both identity residuals are within `tol`.
bool verify_identities(const NetworkModel& m, const BeamformerSet& f, double tol = 1e-8);

}  // namespace sensorbf
