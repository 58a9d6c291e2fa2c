#include "sensorbf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

#include "sensorbf/batch_bca.hpp"
#include "sensorbf/cyclic_bca.hpp"
#include "sensorbf/kkt.hpp"
#include "sensorbf/scenario.hpp"

namespace sensorbf {

namespace {

class Tally {
 public:
  Tally(std::string name, double tol) { c_.name = std::move(name), c_.tol = tol; }

  void record(double err) {
    ++c_.evaluated;
    if (!(err <= c_.tol)) ++c_.failures;
    if (std::isnan(err) || err > c_.worst) c_.worst = err;
  }
  void fail() { record(std::numeric_limits<double>::infinity()); }

  // Evaluates fn and records its error; exceptions count as failures.
  void run(const std::function<double()>& fn) {
    try {
      record(fn());
    } catch (const std::exception&) {
      fail();
    }
  }

  const VerifyCheck& check() const { return c_; }

 private:
  VerifyCheck c_;
};

ScenarioConfig random_config(std::mt19937_64& rng, Index K) {
  std::uniform_int_distribution<Index> dim(1, 4);
  std::uniform_real_distribution<double> snr(-5.0, 15.0), sens(0.0, 15.0), gam(0.0, 0.8),
      pw(0.5, 3.0);
  ScenarioConfig c;
  c.K = K > 0 ? K : dim(rng);
  c.L = dim(rng);
  c.M = dim(rng);
  c.gamma = gam(rng);
  c.snr_channel_db = {snr(rng)};
  c.N.clear();
  c.snr_sensor_db.clear();
  c.P.clear();
  for (Index i = 0; i < c.L; ++i) {
    c.N.push_back(dim(rng));
    c.snr_sensor_db.push_back(sens(rng));
    c.P.push_back(pw(rng));
  }
  return c;
}

// Feasible beamformers at a random fraction of each budget.
BeamformerSet random_interior(const NetworkModel& m, std::mt19937_64& rng) {
  BeamformerSet f = random_full_power(m, rng);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  for (auto& x : f.F) x *= std::sqrt(frac(rng));
  return f;
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

double directional_gradient_error(const NetworkModel& m, const BeamformerSet& f,
                                  std::mt19937_64& rng) {
  double worst = 0.0;
  const double h = 1e-5;
  for (Index i = 0; i < m.L(); ++i) {
    CMat dir(m.N(i), m.K());
    for (Index k = 0; k < dir.size(); ++k) dir(k) = complex_normal(rng);
    dir /= dir.norm();
    const double scale = std::max(f.F[i].norm(), 1.0);
    BeamformerSet p = f, q = f;
    p.F[i] += h * scale * dir;
    q.F[i] -= h * scale * dir;
    const double fd = (mutual_information(m, p) - mutual_information(m, q)) / (2 * h * scale);
    const CMat g = mi_gradient(m, f, i);
    const double an = 2.0 * (g.adjoint() * dir).trace().real();
    worst = std::max(worst, std::abs(fd - an) / std::max(g.norm(), 1e-3));
  }
  return worst;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

VerifyReport run_verify_suite(int instances, std::uint64_t seed) {
  Tally surrogate("surrogate_tightness", 1e-9);
  Tally identities("closed_form_identities", 1e-8);
  Tally gradient("mi_gradient_vs_central_difference", 1e-6);
  Tally qcqp("qcqp_objective_vs_weighted_mse", 1e-9);
  Tally trs("trs_certificate", 1e-8);
  Tally scalar("scalar_closed_form_vs_trs", 1e-9);
  Tally cones("socp_cone_membership", 1e-9);
  Tally monotone("bca_monotone_mi", 1e-9);
  Tally feasible("bca_final_feasibility", 1e-8);

  std::mt19937_64 rng(seed);
  for (int n = 0; n < instances; ++n) {
    const ScenarioConfig cfg = random_config(rng, 0);
    const NetworkModel m = build_model(cfg, rng());
    const BeamformerSet f = random_interior(m, rng);

    surrogate.run([&] {
      const double mi = mutual_information(m, f);
      return rel(surrogate_objective(m, f, closed_form_state(m, f)), mi);
    });
    identities.run([&] {
      const IdentityReport r = identity_residuals(m, f);
      return std::max(r.postcoder_residual, r.weighted_gram_residual);
    });
    gradient.run([&] { return directional_gradient_error(m, f, rng); });

    const WmmseState s = closed_form_state(m, f);
    qcqp.run([&] {
      const QcqpData d = assemble_qcqp(m, s);
      return rel(qcqp_objective(d, f.stacked()), weighted_mse(m, f, s));
    });

    for (Index i = 0; i < m.L(); ++i) {
      trs.run([&] {
        const TrsProblem p = whiten_subproblem(build_subproblem(m, s, f, i));
        const TrsSolution x = solve_trs(p);
        const double scale = 1.0 + p.q.norm() + max_eig(p.Q) * x.x.norm();
        const double over = std::max(0.0, x.x.norm() - p.rho) / p.rho;
        const double slack = x.mu * std::abs(x.x.norm() - p.rho) / p.rho;
        return std::max({x.kkt_residual / scale, over, slack, x.mu < 0 ? -x.mu : 0.0});
      });
    }

    cones.run([&] {
      const QcqpData d = assemble_qcqp(m, s);
      const CVec x = solve_qcqp(d, f.stacked()).f;
      const SocpExport e = export_socp(d);
      double worst = 0.0;
      for (Index i = 0; i < d.blocks(); ++i)
        worst = std::max(worst, -power_cone_margin(e, x, i) / (1.0 + d.P[i]));
      const double quad = x.dot(d.quadratic().mat() * x).real();
      if (!objective_cone_holds(e, x, quad * (1.0 + 1e-12) + 1e-15, 1e-12)) worst = 1.0;
      return worst;
    });

    for (Algorithm a : {Algorithm::Batch, Algorithm::Cyclic}) {
      BcaOptions o;
      o.max_outer = 30;
      o.compute_kkt = false;
      o.record_timing = false;
      try {
        const BcaResult r =
            a == Algorithm::Batch ? run_batch_bca(m, f, o) : run_cyclic_bca(m, f, o);
        monotone.record(std::max(0.0, -r.trace.min_increment()));
        double over = 0.0;
        for (Index i = 0; i < m.L(); ++i)
          over = std::max(over, transmit_power(m, r.F, i) / m.budget(i) - 1.0);
        feasible.record(std::max(over, 0.0));
      } catch (const std::exception&) {
        monotone.fail();
        feasible.fail();
      }
    }

    const NetworkModel m1 = build_model(random_config(rng, 1), rng());
    const BeamformerSet f1 = random_interior(m1, rng);
    const WmmseState s1 = closed_form_state(m1, f1);
    for (Index i = 0; i < m1.L(); ++i) {
      scalar.run([&] {
        const CVec a = solve_subproblem_scalar(m1, s1.G.col(0), f1, i);
        const CVec b = solve_subproblem(build_subproblem(m1, s1, f1, i));
        return (a - b).norm() / (1.0 + b.norm());
      });
    }
  }

  VerifyReport r;
  for (const Tally* t : {&surrogate, &identities, &gradient, &qcqp, &trs, &scalar, &cones,
                         &monotone, &feasible})
    r.checks.push_back(t->check());
  return r;
}

void print_verify_report(std::ostream& os, const VerifyReport& r) {
  char line[160];
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "%-4s %-36s evaluated=%-5d failures=%-4d worst=%.3e tol=%.1e\n",
                  c.passed() ? "ok" : "FAIL", c.name.c_str(), c.evaluated, c.failures, c.worst,
                  c.tol);
    os << line;
  }
  os << (r.passed() ? "all checks passed\n" : "some checks failed\n");
}

}  // namespace sensorbf
