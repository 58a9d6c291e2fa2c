#include "sensorbf/batch_bca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "sensorbf/errors.hpp"

namespace sensorbf {

namespace {

using Clock = std::chrono::steady_clock;

void check_block(const QcqpData& d, Index i, const char* who) {
  if (i < 0 || i >= d.blocks())
    throw PreconditionError(std::string(who) + ": block index " + std::to_string(i) +
                            " out of range");
}

void check_vector(const QcqpData& d, const CVec& f, const char* who) {
  if (f.size() != d.size())
    throw DimensionError(std::string(who) + ": vector length " + std::to_string(f.size()) +
                         " does not match " + std::to_string(d.size()));
}

// Radial projection of each block onto ||x_i||^2 <= P_i.
void project_balls(CVec& x, const std::vector<Index>& off, const std::vector<double>& P) {
  for (std::size_t i = 0; i < P.size(); ++i) {
    auto blk = x.segment(off[i], off[i + 1] - off[i]);
    const double nrm = blk.norm();
    const double r = std::sqrt(P[i]);
    if (nrm > r) blk *= r / nrm;
  }
}

double quad_objective(const CMat& q, const CVec& b, const CVec& x) {
  return x.dot(q * x).real() - 2.0 * b.dot(x).real();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

HermMat QcqpData::C() const { return block_diag(C_blocks); }

HermMat QcqpData::D(Index i) const {
  check_block(*this, i, "QcqpData::D");
  CMat out = CMat::Zero(size(), size());
  out.block(offsets[i], offsets[i], block_size(i), block_size(i)) = D_blocks[i].mat();
  return HermMat::symmetrized(out);
}

HermMat QcqpData::quadratic() const {
  CMat q = A.mat();
  for (Index i = 0; i < blocks(); ++i)
    q.block(offsets[i], offsets[i], block_size(i), block_size(i)) += C_blocks[i].mat();
  return HermMat::symmetrized(q);
}

CVec QcqpData::linear() const { return B.adjoint() * g; }

QcqpData assemble_qcqp(const NetworkModel& m, const WmmseState& s) {
  if (s.G.rows() != m.M() || s.G.cols() != m.K() || s.W.order() != m.K())
    throw DimensionError("assemble_qcqp: W must be K x K and G M x K");
  if (!(min_eig(s.W) > 0)) throw DomainError("assemble_qcqp: W must be positive definite");
  const Index K = m.K();
  const Index L = m.L();
  QcqpData d;
  d.offsets.assign(1, 0);
  for (Index i = 0; i < L; ++i) d.offsets.push_back(d.offsets.back() + K * m.N(i));
  const Index n = d.offsets.back();

  const CMat gwg = s.G * s.W.mat() * s.G.adjoint();
  std::vector<CMat> hg;  // H_i^H G W G^H
  for (Index i = 0; i < L; ++i) hg.push_back(m.channel(i).adjoint() * gwg);
  const CMat ss_conj = m.sigma_s().mat().conjugate();

  CMat a(n, n);
  for (Index i = 0; i < L; ++i) {
    for (Index j = i; j < L; ++j) {
      const CMat blk = kron(ss_conj, hg[i] * m.channel(j));
      a.block(d.offsets[i], d.offsets[j], blk.rows(), blk.cols()) = blk;
      if (j != i) a.block(d.offsets[j], d.offsets[i], blk.cols(), blk.rows()) = blk.adjoint();
    }
  }
  d.A = HermMat::symmetrized(a);

  const CMat ws_conj = (s.W.mat() * m.sigma_s().mat()).conjugate();
  d.B.resize(K * m.M(), n);
  for (Index i = 0; i < L; ++i) {
    d.B.middleCols(d.offsets[i], K * m.N(i)) = kron(ws_conj, m.channel(i));
    d.C_blocks.push_back(
        HermMat::symmetrized(kron(m.sigma_i(i).mat().conjugate(), hg[i] * m.channel(i))));
    d.D_blocks.push_back(HermMat::symmetrized(
        kron(m.observation_covariance(i).mat().conjugate(), CMat::Identity(m.N(i), m.N(i)))));
    d.P.push_back(m.budget(i));
  }
  d.g = vec(s.G);
  d.c = (s.W.mat() * m.sigma_s().mat()).trace().real() + m.sigma0_sq() * gwg.trace().real();
  return d;
}

double qcqp_objective(const QcqpData& d, const CVec& f) {
  check_vector(d, f, "qcqp_objective");
  double quad = f.dot(d.A.mat() * f).real();
  for (Index i = 0; i < d.blocks(); ++i) {
    const auto fi = f.segment(d.offsets[i], d.block_size(i));
    quad += fi.dot(d.C_blocks[i].mat() * fi).real();
  }
  return quad - 2.0 * d.g.dot(d.B * f).real() + d.c;
}

double qcqp_block_power(const QcqpData& d, const CVec& f, Index i) {
  check_vector(d, f, "qcqp_block_power");
  check_block(d, i, "qcqp_block_power");
  const auto fi = f.segment(d.offsets[i], d.block_size(i));
  return fi.dot(d.D_blocks[i].mat() * fi).real();
}

QcqpResult solve_qcqp(const QcqpData& d, const CVec& f0, const QcqpOptions& opts) {
  check_vector(d, f0, "solve_qcqp");
  if (opts.max_iter < 0 || !(opts.tol > 0))
    throw PreconditionError("solve_qcqp: max_iter must be >= 0 and tol > 0");
  const Index n = d.size();
  const Index L = d.blocks();

  // Whitening T = blockdiag(E_i^{-1/2}); Q~ = T (A + C) T, b~ = T B^H g.
  std::vector<HermMat> t_blk, e_half;
  for (Index i = 0; i < L; ++i) {
    t_blk.push_back(inv_sqrt_pd(d.D_blocks[i]));
    e_half.push_back(sqrt_psd(d.D_blocks[i]));
  }
  const CVec lin = d.linear();
  CMat q = d.quadratic().mat();
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    q.middleRows(o, k) = t_blk[i].mat() * q.middleRows(o, k);
  }
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    q.middleCols(o, k) = q.middleCols(o, k) * t_blk[i].mat();
  }
  q = 0.5 * (q + q.adjoint()).eval();
  CVec b(n), x0(n);
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    b.segment(o, k) = t_blk[i].mat() * lin.segment(o, k);
    x0.segment(o, k) = e_half[i].mat() * f0.segment(o, k);
  }
  project_balls(x0, d.offsets, d.P);

  Eigen::SelfAdjointEigenSolver<CMat> es(q, Eigen::EigenvaluesOnly);
  const double top = n ? std::max(es.eigenvalues()(n - 1), 0.0) : 0.0;
  const double low = n ? es.eigenvalues()(0) : 0.0;
  if (low < -kRankTol * std::max(top, 1e-300) && low < -1e-300)
    throw DomainError("solve_qcqp: A + C is indefinite (min eigenvalue " + std::to_string(low) +
                      ")");

  QcqpResult res;
  // Iterates start at the origin and stay in range(Q~) + span(b~), so
  // directions Q~ cannot see are never populated.
  CVec x = CVec::Zero(n);
  if (top <= 0.0) {
    // Linear objective: each block goes to the boundary along b~_i.
    for (Index i = 0; i < L; ++i) {
      const Index o = d.offsets[i], k = d.block_size(i);
      const double nb = b.segment(o, k).norm();
      x.segment(o, k) = nb > 0 ? CVec(b.segment(o, k) * (std::sqrt(d.P[i]) / nb))
                               : CVec(CVec::Zero(k));
    }
  } else {
    const double lip = 2.0 * top;
    const double thresh = opts.tol * (1.0 + b.norm());
    CVec y = x;
    double t = 1.0;
    res.status = QcqpStatus::BudgetExhausted;
    for (int it = 0; it < opts.max_iter; ++it) {
      res.iterations = it + 1;
      CVec xn = y - (2.0 / lip) * (q * y - b);
      project_balls(xn, d.offsets, d.P);
      if (lip * (xn - y).norm() <= thresh) {
        x = std::move(xn);
        res.status = QcqpStatus::Converged;
        break;
      }
      if ((y - xn).dot(xn - x).real() > 0.0) {
        t = 1.0;
        y = xn;
        x = std::move(xn);
        continue;
      }
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      x = std::move(xn);
      t = tn;
    }
    if (opts.max_iter == 0) res.status = QcqpStatus::BudgetExhausted;
    const double fx = quad_objective(q, b, x);
    if (quad_objective(q, b, x0) < fx - 1e-13 * (1.0 + std::abs(fx))) x = x0;
  }

  // Multipliers from the whitened block gradients on active balls.
  const CVec r = q * x - b;
  res.multipliers.assign(static_cast<std::size_t>(L), 0.0);
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    const double xx = x.segment(o, k).squaredNorm();
    if (xx >= d.P[i] * (1.0 - 1e-6) && xx > 0.0)
      res.multipliers[i] = std::max(0.0, -x.segment(o, k).dot(r.segment(o, k)).real() / xx);
  }
  res.f.resize(n);
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    res.f.segment(o, k) = t_blk[i].mat() * x.segment(o, k);
  }
  CVec stat = d.quadratic().mat() * res.f - lin;
  for (Index i = 0; i < L; ++i) {
    const Index o = d.offsets[i], k = d.block_size(i);
    stat.segment(o, k) += res.multipliers[i] * (d.D_blocks[i].mat() * res.f.segment(o, k));
    res.complementarity =
        std::max(res.complementarity,
                 std::abs(res.multipliers[i] * (x.segment(o, k).squaredNorm() - d.P[i])) / d.P[i]);
  }
  res.stationarity = stat.norm() / (1.0 + lin.norm());
  res.objective = qcqp_objective(d, res.f);
  return res;
}

HermMat SocpExport::sqrtD(Index i) const {
  if (i < 0 || i >= static_cast<Index>(sqrtD_blocks.size()))
    throw PreconditionError("SocpExport::sqrtD: block index out of range");
  const Index n = offsets.back();
  CMat out = CMat::Zero(n, n);
  out.block(offsets[i], offsets[i], sqrtD_blocks[i].order(), sqrtD_blocks[i].order()) =
      sqrtD_blocks[i].mat();
  return HermMat::symmetrized(out);
}

SocpExport export_socp(const QcqpData& d) {
  SocpExport e;
  e.sqrtAC = sqrt_psd(d.quadratic());
  for (const auto& blk : d.D_blocks) e.sqrtD_blocks.push_back(sqrt_psd(blk));
  e.offsets = d.offsets;
  e.linear = d.linear();
  e.c = d.c;
  e.P = d.P;
  return e;
}

bool objective_cone_holds(const SocpExport& e, const CVec& f, double s, double tol) {
  const CVec v = e.sqrtAC.mat() * f;
  const double lhs = std::sqrt(v.squaredNorm() + 0.25 * (s - 1.0) * (s - 1.0));
  return lhs <= 0.5 * (s + 1.0) + tol;
}

double power_cone_margin(const SocpExport& e, const CVec& f, Index i) {
  if (i < 0 || i >= static_cast<Index>(e.P.size()))
    throw PreconditionError("power_cone_margin: block index out of range");
  const Index k = e.sqrtD_blocks[i].order();
  const CVec v = e.sqrtD_blocks[i].mat() * f.segment(e.offsets[i], k);
  const double p = e.P[i];
  return 0.5 * (p + 1.0) - std::sqrt(v.squaredNorm() + 0.25 * (p - 1.0) * (p - 1.0));
}

bool power_cone_holds(const SocpExport& e, const CVec& f, Index i, double tol) {
  return power_cone_margin(e, f, i) >= -tol;
}

namespace {

void write_matrix(std::ostream& os, const CMat& a) {
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      if (c) os << ' ';
      os << a(r, c).real() << ' ' << a(r, c).imag();
    }
    os << '\n';
  }
}

void expect(std::istream& is, const std::string& word) {
  std::string tok;
  if (!(is >> tok) || tok != word)
    throw ConfigError("read_socp: expected '" + word + "', found '" + tok + "'");
}

template <class T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) throw ConfigError(std::string("read_socp: could not read ") + what);
  return v;
}

CMat read_matrix(std::istream& is, Index rows, Index cols) {
  CMat a(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const double re = read_value<double>(is, "matrix entry");
      const double im = read_value<double>(is, "matrix entry");
      a(r, c) = Complex(re, im);
    }
  return a;
}

}  // namespace

void write_socp(std::ostream& os, const SocpExport& e) {
  const Index n = e.offsets.back();
  const auto L = e.P.size();
  const auto old_prec = os.precision(17);
  os << "sensorbf-socp 1\n";
  os << "dim " << n << "\n";
  os << "blocks " << L << "\n";
  os << "constant " << e.c << "\n";
  for (std::size_t i = 0; i < L; ++i)
    os << "block " << i << ' ' << e.offsets[i] << ' ' << e.offsets[i + 1] - e.offsets[i] << ' '
       << e.P[i] << "\n";
  os << "linear\n";
  write_matrix(os, e.linear);
  os << "sqrt_quadratic\n";
  write_matrix(os, e.sqrtAC.mat());
  for (std::size_t i = 0; i < L; ++i) {
    os << "sqrt_power " << i << "\n";
    write_matrix(os, e.sqrtD_blocks[i].mat());
  }
  os << "cones " << L + 1 << "\n";
  os << "rotated objective\n";
  for (std::size_t i = 0; i < L; ++i) os << "rotated power " << i << "\n";
  os << "end\n";
  os.precision(old_prec);
}

SocpExport read_socp(std::istream& is) {
  SocpExport e;
  expect(is, "sensorbf-socp");
  if (read_value<int>(is, "version") != 1) throw ConfigError("read_socp: unsupported version");
  expect(is, "dim");
  const auto n = read_value<Index>(is, "dim");
  expect(is, "blocks");
  const auto L = read_value<std::size_t>(is, "block count");
  expect(is, "constant");
  e.c = read_value<double>(is, "constant");
  e.offsets.assign(1, 0);
  for (std::size_t i = 0; i < L; ++i) {
    expect(is, "block");
    if (read_value<std::size_t>(is, "block index") != i)
      throw ConfigError("read_socp: blocks out of order");
    const auto off = read_value<Index>(is, "offset");
    const auto size = read_value<Index>(is, "size");
    if (off != e.offsets.back() || size <= 0) throw ConfigError("read_socp: bad block layout");
    e.offsets.push_back(off + size);
    e.P.push_back(read_value<double>(is, "budget"));
  }
  if (e.offsets.back() != n) throw ConfigError("read_socp: block sizes do not sum to dim");
  expect(is, "linear");
  e.linear = read_matrix(is, n, 1);
  expect(is, "sqrt_quadratic");
  e.sqrtAC = HermMat(read_matrix(is, n, n));
  for (std::size_t i = 0; i < L; ++i) {
    expect(is, "sqrt_power");
    if (read_value<std::size_t>(is, "block index") != i)
      throw ConfigError("read_socp: sqrt_power blocks out of order");
    const Index k = e.offsets[i + 1] - e.offsets[i];
    e.sqrtD_blocks.push_back(HermMat(read_matrix(is, k, k)));
  }
  expect(is, "cones");
  if (read_value<std::size_t>(is, "cone count") != L + 1)
    throw ConfigError("read_socp: cone count mismatch");
  expect(is, "rotated");
  expect(is, "objective");
  for (std::size_t i = 0; i < L; ++i) {
    expect(is, "rotated");
    expect(is, "power");
    if (read_value<std::size_t>(is, "cone index") != i)
      throw ConfigError("read_socp: cones out of order");
  }
  expect(is, "end");
  return e;
}

void write_socp_file(const std::string& path, const SocpExport& e) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_socp(os, e);
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

BcaResult run_batch_bca(const NetworkModel& m, const BeamformerSet& f0, const BcaOptions& opts) {
  check_conforms(m, f0);
  if (!is_feasible(m, f0)) throw DomainError("run_batch_bca: initial beamformers are infeasible");
  if (opts.max_outer < 0) throw PreconditionError("run_batch_bca: max_outer must be >= 0");

  BcaResult res;
  res.F = f0;
  res.state = closed_form_state(m, f0);
  res.trace.algorithm = Algorithm::Batch;
  res.trace.mi.push_back(mutual_information(m, f0));
  res.trace.wall_s.push_back(0.0);

  for (int j = 0; j < opts.max_outer; ++j) {
    const auto t0 = Clock::now();
    const QcqpData d = assemble_qcqp(m, res.state);
    const QcqpResult qr = solve_qcqp(d, res.F.stacked(), opts.inner);
    if (qr.status == QcqpStatus::BudgetExhausted) ++res.trace.inner_budget_exhausted;
    res.F = BeamformerSet::from_stacked(m, qr.f);
    res.state.G = update_G(m, res.F);
    res.state.W = update_W(m, res.F, res.state.G);
    const double mi = mutual_information(m, res.F);
    res.trace.wall_s.push_back(opts.record_timing ? seconds_since(t0) : 0.0);
    const double gain = mi - res.trace.mi.back();
    res.trace.mi.push_back(mi);
    if (gain < opts.mi_tol) break;
  }
  if (opts.compute_kkt) res.trace.kkt = kkt_residual_p0(m, res.F, res.state);
  return res;
}

}  // namespace sensorbf
