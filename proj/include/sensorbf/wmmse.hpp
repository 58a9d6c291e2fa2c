#pragma once

#include "sensorbf/model.hpp"

namespace sensorbf {

/// Auxiliary blocks of the weighted-MSE surrogate: weight W (K x K, PD) and
/// linear postcoder G (M x K).
struct WmmseState {
  HermMat W;
  CMat G;
};

/// E(G) = (I - G^H H~) Sigma_s (I - G^H H~)^H + G^H Sigma_n G.
HermMat mse_matrix(const NetworkModel& m, const BeamformerSet& f, const CMat& G);
/// Same from H~ and Sigma_n directly.
HermMat mse_matrix(const CMat& heff, const HermMat& sigma_n, const HermMat& sigma_s,
                   const CMat& G);

/// MMSE postcoder G* = (H~ Sigma_s H~^H + Sigma_n)^{-1} H~ Sigma_s, the
/// minimizer of Tr{W E(G)} for every PD W.
CMat update_G(const NetworkModel& m, const BeamformerSet& f);
CMat update_G(const CMat& heff, const HermMat& sigma_n, const HermMat& sigma_s);

/// W* = E(G)^{-1}. E(G) is floored at 1e-12 * maxeig before inversion and the
/// result is re-symmetrized.
HermMat update_W(const NetworkModel& m, const BeamformerSet& f, const CMat& G);
/// Floored inverse of a given MSE matrix.
HermMat update_W(HermMat mse);

/// G = update_G(f) followed by W = update_W(f, G).
WmmseState closed_form_state(const NetworkModel& m, const BeamformerSet& f);

/// Tr{W E(G)}: the objective minimized over {F_i} in each batch step.
double weighted_mse(const NetworkModel& m, const BeamformerSet& f, const WmmseState& s);

/// log det W - Tr{W E(G)} + K + log det Sigma_s. Never exceeds the mutual
/// information of f and equals it at closed_form_state(f).
double surrogate_objective(const NetworkModel& m, const BeamformerSet& f,
                           const WmmseState& s);

}  // namespace sensorbf
