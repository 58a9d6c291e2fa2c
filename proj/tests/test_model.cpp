#include "doctest.h"
#include "sensorbf/errors.hpp"
#include "sensorbf/model.hpp"
#include "test_support.hpp"

using namespace sensorbf;
using sbt::Rng;

namespace {

CMat scalar(Complex v) {
  CMat a(1, 1);
  a(0, 0) = v;
  return a;
}

HermMat hs(double v) { return HermMat(scalar(v)); }

NetworkModel scalar_chain(double sig_i = 0.0, double sig0 = 1.0, double p = 1.0) {
  return NetworkModel({scalar(1.0)}, hs(1.0), {hs(sig_i)}, sig0, {p});
}

}  // namespace

TEST_CASE("NetworkModel validation") {
  CHECK_THROWS_AS(NetworkModel({}, hs(1), {}, 1.0, {}), DimensionError);
  CHECK_THROWS_AS(NetworkModel({scalar(1)}, hs(1), {hs(0)}, 0.0, {1.0}), DomainError);
  CHECK_THROWS_AS(NetworkModel({scalar(1)}, hs(0), {hs(0)}, 1.0, {1.0}), DomainError);
  CHECK_THROWS_AS(NetworkModel({scalar(1)}, hs(1), {hs(-1)}, 1.0, {1.0}), DomainError);
  CHECK_THROWS_AS(NetworkModel({scalar(1)}, hs(1), {hs(0)}, 1.0, {0.0}), DomainError);
  CHECK_THROWS_AS(NetworkModel({scalar(1), CMat::Ones(2, 1)}, hs(1), {hs(0), hs(0)}, 1.0,
                               {1.0, 1.0}),
                  DimensionError);
  CHECK_THROWS_AS(NetworkModel({scalar(1)}, hs(1), {hs(0), hs(0)}, 1.0, {1.0}), DimensionError);
}

TEST_CASE("effective_channel") {
  Rng rng(21);
  const NetworkModel m = sbt::random_model(rng, {2, 3, 3, {2, 1, 3}}, 5.0);
  CHECK(effective_channel(m, BeamformerSet::zeros(m)).norm() == 0.0);
  const BeamformerSet f = sbt::random_beamformers(rng, m);
  CMat acc = CMat::Zero(3, 2);
  for (Index i = 0; i < 3; ++i)
    for (Index r = 0; r < 3; ++r)
      for (Index c = 0; c < 2; ++c)
        for (Index k = 0; k < m.N(i); ++k) acc(r, c) += m.channel(i)(r, k) * f.F[i](k, c);
  CHECK((effective_channel(m, f) - acc).norm() <= 1e-13);

  const CMat a = sbt::random_cmat(rng, 3, 2);
  const NetworkModel id({CMat::Identity(3, 3)}, HermMat::identity(2), {HermMat::zero(2)}, 1.0,
                        {1.0});
  BeamformerSet one;
  one.F.push_back(a);
  CHECK((effective_channel(id, one) - a).norm() == 0.0);

  BeamformerSet bad = f;
  bad.F.pop_back();
  CHECK_THROWS_AS(effective_channel(m, bad), DimensionError);
  bad = f;
  bad.F[0] = CMat::Zero(3, 2);
  CHECK_THROWS_AS(effective_channel(m, bad), DimensionError);
}

TEST_CASE("noise_covariance") {
  Rng rng(22);
  const NetworkModel m = sbt::random_model(rng, {2, 3, 4, {2, 1, 3}}, 5.0);
  CHECK((noise_covariance(m, BeamformerSet::zeros(m)).mat() -
         m.sigma0_sq() * CMat::Identity(4, 4))
            .norm() <= 1e-15);

  const NetworkModel id({CMat::Identity(2, 2)}, HermMat::identity(2), {HermMat::identity(2)},
                        1.0, {1.0});
  BeamformerSet one;
  one.F.push_back(CMat::Identity(2, 2));
  CHECK((noise_covariance(id, one).mat() - 2.0 * CMat::Identity(2, 2)).norm() <= 1e-15);

  const BeamformerSet f = sbt::random_beamformers(rng, m);
  const HermMat sn = noise_covariance(m, f);
  // vec(H F S F^H H^H) = (conj(H F) (x) H F) vec(S)
  CVec acc = m.sigma0_sq() * vec(CMat::Identity(4, 4));
  for (Index i = 0; i < 3; ++i) {
    const CMat hf = m.channel(i) * f.F[i];
    acc += kron(hf.conjugate(), hf) * vec(m.sigma_i(i).mat());
  }
  CHECK((vec(sn.mat()) - acc).norm() <= 1e-12 * (1 + acc.norm()));
  CHECK(min_eig(sn) >= m.sigma0_sq() * (1 - 1e-10));
}

TEST_CASE("mutual_information") {
  Rng rng(23);
  const NetworkModel m = sbt::random_model(rng, {3, 2, 4, {2, 3}}, 10.0);
  CHECK(std::abs(mutual_information(m, BeamformerSet::zeros(m))) <= 1e-12);

  const NetworkModel chain = scalar_chain();
  BeamformerSet one;
  one.F.push_back(scalar(1.0));
  CHECK(mutual_information(chain, one) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  for (int t = 0; t < 20; ++t) {
    const NetworkModel r = sbt::random_generic_model(rng, sbt::random_shape(rng));
    const BeamformerSet f = sbt::random_beamformers(rng, r);
    const double mi = mutual_information(r, f);
    CHECK(mi >= 0);
    const CMat h = effective_channel(r, f);
    const HermMat sn = noise_covariance(r, f);
    const HermMat alt = HermMat::symmetrized(h.adjoint() * inverse_pd(sn).mat() * h +
                                             inverse_pd(r.sigma_s()).mat());
    CHECK(std::abs(mi - (log_det_pd(alt) + log_det_pd(r.sigma_s()))) <= 1e-9 * (1 + mi));

    // Unit-modulus rotation of every channel leaves MI unchanged.
    std::vector<CMat> rot;
    const Complex ph = std::polar(1.0, sbt::uniform(rng, 0, 6.28));
    for (const CMat& c : r.channels()) rot.push_back(ph * c);
    const NetworkModel rm(rot, r.sigma_s(), r.sensing_noise(), r.sigma0_sq(), r.budgets());
    CHECK(std::abs(mutual_information(rm, f) - mi) <= 1e-10 * (1 + mi));
  }
}

TEST_CASE("transmit_power and is_feasible") {
  const NetworkModel chain = scalar_chain(1.0);
  BeamformerSet one;
  one.F.push_back(scalar(Complex(0.6, 0.8) * 1.5));
  CHECK(transmit_power(chain, one, 0) == doctest::Approx(2 * 2.25));
  CHECK_THROWS_AS(transmit_power(chain, one, 1), PreconditionError);
  CHECK_THROWS_AS(transmit_power(chain, one, -1), PreconditionError);

  Rng rng(24);
  const NetworkModel m = sbt::random_generic_model(rng, {3, 2, 2, {2, 4}});
  CHECK(transmit_power(m, BeamformerSet::zeros(m), 1) == 0.0);
  BeamformerSet f = sbt::random_beamformers(rng, m);
  for (Index i = 0; i < 2; ++i) {
    const CMat s = m.observation_covariance(i).mat();
    Complex acc = 0;
    for (Index a = 0; a < m.N(i); ++a)
      for (Index k = 0; k < 3; ++k)
        for (Index l = 0; l < 3; ++l) acc += f.F[i](a, k) * s(k, l) * std::conj(f.F[i](a, l));
    CHECK(std::abs(transmit_power(m, f, i) - acc.real()) <= 1e-12 * (1 + acc.real()));
  }

  CHECK(is_feasible(m, BeamformerSet::zeros(m)));
  for (Index i = 0; i < 2; ++i) f.F[i] *= std::sqrt(m.budget(i) / transmit_power(m, f, i));
  CHECK(is_feasible(m, f, 1e-9));
  f.F[1] *= std::sqrt(1.01);
  CHECK_FALSE(is_feasible(m, f, 1e-9));
  CHECK_THROWS_AS(is_feasible(m, f, -1.0), PreconditionError);
}

TEST_CASE("whiten_receiver_noise") {
  Rng rng(25);
  const NetworkModel m = sbt::random_model(rng, {2, 2, 3, {2, 3}}, 5.0);
  const BeamformerSet f = sbt::random_beamformers(rng, m);

  const NetworkModel one(m.channels(), m.sigma_s(), m.sensing_noise(), 1.0, m.budgets());
  const NetworkModel same = whiten_receiver_noise(one, HermMat::identity(3));
  for (Index i = 0; i < 2; ++i) CHECK((same.channel(i) - m.channel(i)).norm() <= 1e-15);
  CHECK(same.sigma0_sq() == 1.0);

  const NetworkModel four = whiten_receiver_noise(m, HermMat::identity(3) * 4.0);
  for (Index i = 0; i < 2; ++i) CHECK((four.channel(i) - 0.5 * m.channel(i)).norm() <= 1e-15);
  const NetworkModel colored4(m.channels(), m.sigma_s(), m.sensing_noise(), 4.0, m.budgets());
  CHECK(std::abs(mutual_information(four, f) - mutual_information(colored4, f)) <= 1e-12);

  for (int t = 0; t < 10; ++t) {
    const HermMat s0 = sbt::random_pd(rng, 3, 0.1, 2.0);
    const NetworkModel w = whiten_receiver_noise(m, s0);
    // Colored-noise MI from the definition with Sigma_n = Sigma0 + sum H F S F^H H^H.
    const CMat h = effective_channel(m, f);
    CMat sn = s0.mat();
    for (Index i = 0; i < 2; ++i) {
      const CMat hf = m.channel(i) * f.F[i];
      sn += hf * m.sigma_i(i).mat() * hf.adjoint();
    }
    const double direct = mutual_information(h, m.sigma_s(), HermMat::symmetrized(sn));
    CHECK(std::abs(mutual_information(w, f) - direct) <= 1e-9 * (1 + direct));
  }

  CHECK_THROWS_AS(whiten_receiver_noise(m, HermMat::zero(3)), DomainError);
  CHECK_THROWS_AS(whiten_receiver_noise(m, HermMat::identity(2)), DimensionError);
}
