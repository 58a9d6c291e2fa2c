#include "doctest.h"
#include "sensorbf/errors.hpp"
#include "sensorbf/trs.hpp"
#include "test_support.hpp"

using namespace sensorbf;
using sbt::Rng;

namespace {

RVec rv(std::initializer_list<double> v) {
  RVec r(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) r(k++) = x;
  return r;
}

CVec cv(std::initializer_list<double> v) { return rv(v).cast<Complex>(); }

TrsProblem random_problem(Rng& rng, Index n, Index rank) {
  TrsProblem p;
  p.Q = sbt::random_psd(rng, n, rank, 0.1, 3.0);
  p.q = sbt::random_cvec(rng, n) * sbt::uniform(rng, 0.1, 3.0);
  // Half of the instances put q inside range(Q) to reach the interior branch.
  if (rank > 0 && sbt::uniform(rng, 0, 1) < 0.5) p.q = p.Q.mat() * sbt::random_cvec(rng, n);
  p.rho = sbt::uniform(rng, 0.2, 3.0);
  return p;
}

}  // namespace

TEST_CASE("secular_value") {
  CHECK(secular_value(rv({1}), cv({1}), 1.0) == doctest::Approx(0.25));
  CHECK(secular_value(rv({1, 2}), cv({0, 0}), 0.3) == 0.0);
  CHECK(secular_value(rv({2, 1}), cv({1, 1}), 0.0) == doctest::Approx(1.25));
  CHECK_THROWS_AS(secular_value(rv({0}), cv({1}), 0.0), DomainError);
  CHECK_THROWS_AS(secular_value(rv({1}), cv({1, 1}), 0.0), DimensionError);

  Rng rng(41);
  const RVec lam = rv({3, 1, 0.5, 0});
  const CVec p = sbt::random_cvec(rng, 4);
  double prev = secular_value(lam, p, 1e-3);
  for (double mu = 2e-3; mu < 100; mu *= 1.7) {
    const double cur = secular_value(lam, p, mu);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("solve_secular") {
  CHECK(solve_secular(rv({1}), cv({1}), 0.5) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(solve_secular(rv({0}), cv({1}), 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(solve_secular(rv({1}), cv({1}), 2.0), PreconditionError);

  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    const Index n = sbt::uniform_int(rng, 1, 8);
    RVec lam(n);
    for (Index k = 0; k < n; ++k) lam(k) = sbt::uniform(rng, 0, 1) < 0.3 ? 0.0 : sbt::uniform(rng, 0, 5);
    const CVec p = sbt::random_cvec(rng, n);
    const double rho = sbt::uniform(rng, 0.05, 2.0);
    bool pre = true;
    try {
      const double mu = solve_secular(lam, p, rho);
      CHECK(mu > 0);
      CHECK(std::abs(secular_value(lam, p, mu) - rho * rho) <= 1e-10 * rho * rho);
    } catch (const PreconditionError&) {
      pre = false;
    }
    if (!pre) {
      double f0 = 0;
      for (Index k = 0; k < n; ++k) f0 += std::norm(p(k)) / (lam(k) * lam(k));
      CHECK(f0 <= rho * rho);
    }
  }
}

TEST_CASE("solve_trs closed cases") {
  TrsProblem p{HermMat::identity(3), CVec::Zero(3), 1.0};
  TrsSolution s = solve_trs(p);
  CHECK(s.x.norm() == 0.0);
  CHECK(s.mu == 0.0);
  CHECK(s.kind == TrsCase::MinNormInterior);

  Rng rng(43);
  const CVec q = sbt::random_cvec(rng, 4);
  s = solve_trs({HermMat::zero(4), q, 1.0});
  CHECK(s.kind == TrsCase::BoundaryUnique);
  CHECK((s.x - q / q.norm()).norm() <= 1e-10);
  CHECK(s.mu == doctest::Approx(q.norm()).epsilon(1e-10));

  // Identity with small q: interior, x = q.
  s = solve_trs({HermMat::identity(2), cv({0.3, 0.4}), 1.0});
  CHECK(s.kind == TrsCase::MinNormInterior);
  CHECK((s.x - cv({0.3, 0.4})).norm() <= 1e-14);

  CMat bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(solve_trs({HermMat(bad), cv({1, 1}), 1.0}), DomainError);
  CHECK_THROWS_AS(solve_trs({HermMat::identity(2), cv({1, 1}), 0.0}), PreconditionError);
  CHECK_THROWS_AS(solve_trs({HermMat::identity(2), cv({1}), 1.0}), DimensionError);
}

TEST_CASE("solve_trs: KKT certificate and oracle agreement") {
  Rng rng(44);
  int interior = 0, boundary = 0;
  for (int t = 0; t < 300; ++t) {
    const Index n = sbt::uniform_int(rng, 1, 6);
    const TrsProblem p = random_problem(rng, n, sbt::uniform_int(rng, 0, static_cast<int>(n)));
    const TrsSolution s = solve_trs(p);
    const double rho = p.rho;
    CHECK(s.x.norm() <= rho * (1 + 1e-9));
    CHECK(s.mu >= 0);
    CHECK(std::abs(s.mu * (s.x.squaredNorm() - rho * rho)) <= 1e-8 * rho * rho * (1 + s.mu));
    const double stat = (p.Q.mat() * s.x + s.mu * s.x - p.q).norm();
    CHECK(stat <= s.kkt_residual + 1e-15);
    CHECK(s.kkt_residual <= 1e-7 * (p.q.norm() + 1));
    if (s.kind == TrsCase::BoundaryUnique) {
      ++boundary;
      CHECK(std::abs(s.x.norm() - rho) <= 1e-8 * rho);
    } else {
      ++interior;
      CHECK(s.mu == 0.0);
    }
    const CVec o = sbt::pg_trs_oracle(p.Q.mat(), p.q, rho);
    const double fs = trs_objective(p, s.x);
    const double fo = sbt::trs_value(p.Q.mat(), p.q, o);
    CHECK(fs <= fo + 1e-8 * (1 + std::abs(fo)));
    CHECK(std::abs(fs - fo) <= 1e-8 * (1 + std::abs(fo)));
  }
  CHECK(interior > 30);
  CHECK(boundary > 30);
}

TEST_CASE("solve_trs: min-norm property in the interior case") {
  Rng rng(45);
  int checked = 0;
  while (checked < 30) {
    const Index n = sbt::uniform_int(rng, 2, 6);
    const Index r = sbt::uniform_int(rng, 1, static_cast<int>(n) - 1);
    TrsProblem p;
    p.Q = sbt::random_psd(rng, n, r);
    p.q = p.Q.mat() * sbt::random_cvec(rng, n) * 0.2;
    p.rho = 5.0;
    const TrsSolution s = solve_trs(p);
    if (s.kind != TrsCase::MinNormInterior) continue;
    ++checked;
    const EigDecomp d = herm_eig(p.Q);
    const CMat null = d.U.rightCols(n - r);
    const double fx = trs_objective(p, s.x);
    for (int k = 0; k < 100; ++k) {
      // Other minimizers differ by a null-space component.
      const CVec y = s.x + null * sbt::random_cvec(rng, n - r) * sbt::uniform(rng, 0, 1);
      if (y.norm() > p.rho) continue;
      if (trs_objective(p, y) <= fx + 1e-9) CHECK(s.x.norm() <= y.norm() + 1e-7);
    }
  }
}

TEST_CASE("solve_trs: repeated eigenvalues give a unique boundary solution") {
  Rng rng(46);
  for (int t = 0; t < 20; ++t) {
    const CVec q = sbt::random_cvec(rng, 4) * 3.0;
    TrsProblem p{HermMat::identity(4) * 2.0, q, 0.5};
    const TrsSolution s = solve_trs(p);
    CHECK(s.kind == TrsCase::BoundaryUnique);
    CHECK((s.x - 0.5 * q / q.norm()).norm() <= 1e-9);
  }
}
