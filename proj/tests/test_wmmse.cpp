#include "doctest.h"
#include "sensorbf/wmmse.hpp"
#include "test_support.hpp"

using namespace sensorbf;
using sbt::Rng;

namespace {

CMat scalar(Complex v) {
  CMat a(1, 1);
  a(0, 0) = v;
  return a;
}

}  // namespace

TEST_CASE("mse_matrix special cases") {
  Rng rng(31);
  const NetworkModel m = sbt::random_generic_model(rng, {3, 2, 4, {2, 3}});
  const BeamformerSet f = sbt::random_beamformers(rng, m);
  const CMat G0 = CMat::Zero(4, 3);
  CHECK((mse_matrix(m, f, G0).mat() - m.sigma_s().mat()).norm() <= 1e-14);

  const CMat G = sbt::random_cmat(rng, 4, 3);
  const CMat expect = m.sigma_s().mat() + m.sigma0_sq() * G.adjoint() * G;
  CHECK((mse_matrix(m, BeamformerSet::zeros(m), G).mat() - expect).norm() <= 1e-13);
  CHECK_THROWS(mse_matrix(m, f, CMat::Zero(3, 3)));
}

TEST_CASE("update_G and update_W on the scalar chain") {
  const NetworkModel m({scalar(1)}, HermMat(scalar(1)), {HermMat(scalar(0))}, 1.0, {1.0});
  BeamformerSet f;
  f.F.push_back(scalar(1));
  const CMat G = update_G(m, f);
  CHECK(G(0, 0).real() == doctest::Approx(0.5));
  const HermMat W = update_W(m, f, G);
  CHECK(W.mat()(0, 0).real() == doctest::Approx(2.0));
  CHECK(update_G(m, BeamformerSet::zeros(m)).norm() == 0.0);
}

TEST_CASE("closed-form responses") {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const NetworkModel m = sbt::random_generic_model(rng, sbt::random_shape(rng));
    const BeamformerSet f = sbt::random_beamformers(rng, m);
    const CMat G = update_G(m, f);
    const CMat h = effective_channel(m, f);
    const HermMat sn = noise_covariance(m, f);

    // E(G*) = (H^H Sn^{-1} H + Ss^{-1})^{-1}
    const CMat e = mse_matrix(m, f, G).mat();
    const CMat alt =
        inverse_pd(HermMat::symmetrized(h.adjoint() * inverse_pd(sn).mat() * h +
                                        inverse_pd(m.sigma_s()).mat()))
            .mat();
    CHECK((e - alt).norm() <= 1e-8 * (1 + alt.norm()));

    // Wiener stationarity.
    const CMat wiener = (h * m.sigma_s().mat() * h.adjoint() + sn.mat()) * G - h * m.sigma_s().mat();
    CHECK(wiener.norm() <= 1e-8 * (1 + h.norm()));

    // Perturbation optimality for a random PD weight.
    const HermMat W = sbt::random_pd(rng, m.K());
    const auto cost = [&](const CMat& g) { return weighted_mse(m, f, {W, g}); };
    const double best = cost(G);
    for (int k = 0; k < 100; ++k) {
      const CMat d = sbt::random_cmat(rng, m.M(), m.K()) * sbt::uniform(rng, 1e-4, 1.0);
      CHECK(best <= cost(G + d) + 1e-12 * (1 + best));
    }

    const HermMat Wc = update_W(m, f, G);
    CHECK((Wc.mat() * e - CMat::Identity(m.K(), m.K())).norm() <= 1e-9 * m.K());

    // W = Sigma_s^{-1} when G = 0.
    const CMat z = CMat::Zero(m.M(), m.K());
    CHECK((update_W(m, f, z).mat() - inverse_pd(m.sigma_s()).mat()).norm() <=
          1e-10 * (1 + inverse_pd(m.sigma_s()).mat().norm()));
  }
}

TEST_CASE("surrogate tightness and lower bound") {
  Rng rng(33);
  for (int t = 0; t < 40; ++t) {
    const NetworkModel m = sbt::random_model(rng, sbt::random_shape(rng), sbt::uniform(rng, -5, 15));
    const BeamformerSet f = sbt::random_beamformers(rng, m);
    const double mi = mutual_information(m, f);
    const WmmseState s = closed_form_state(m, f);
    CHECK(std::abs(surrogate_objective(m, f, s) - mi) <= 1e-9 * (1 + mi));
    for (int k = 0; k < 20; ++k) {
      const WmmseState r = sbt::random_state(rng, m);
      CHECK(surrogate_objective(m, f, r) <= mi + 1e-9);
    }
  }
  // Origin: G = 0 and W = Sigma_s^{-1} give zero.
  const NetworkModel m = sbt::random_model(rng, {3, 2, 2, {1, 2}}, 0.0);
  const WmmseState s0{inverse_pd(m.sigma_s()), CMat::Zero(2, 3)};
  CHECK(std::abs(surrogate_objective(m, BeamformerSet::zeros(m), s0)) <= 1e-12);
}

TEST_CASE("weight maximization matches -log det E") {
  Rng rng(34);
  for (int t = 0; t < 10; ++t) {
    const Index n = sbt::uniform_int(rng, 1, 4);
    const HermMat e = sbt::random_pd(rng, n);
    const auto value = [&](const HermMat& w) {
      return log_det_pd(w) - (w.mat() * e.mat()).trace().real() + static_cast<double>(n);
    };
    const double best = value(inverse_pd(e));
    CHECK(std::abs(best + log_det_pd(e)) <= 1e-12 * (1 + std::abs(best)));
    for (int k = 0; k < 200; ++k) CHECK(value(sbt::random_pd(rng, n, 0.05, 5.0)) <= best + 1e-12);
  }
}
