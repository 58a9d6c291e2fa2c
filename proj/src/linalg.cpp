#include "sensorbf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "sensorbf/errors.hpp"

namespace sensorbf {

double hermitian_defect(const CMat& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return hermitian_defect(a) <= tol * scale;
}

bool all_finite(const CMat& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
        return false;
  return true;
}

HermMat::HermMat(const CMat& a) {
  if (a.rows() != a.cols())
    throw PreconditionError("HermMat: matrix is " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + ", not square");
  if (!all_finite(a)) throw PreconditionError("HermMat: non-finite entry");
  if (!is_hermitian(a))
    throw PreconditionError("HermMat: matrix is not Hermitian (defect " +
                            std::to_string(hermitian_defect(a)) + ")");
  a_ = 0.5 * (a + a.adjoint());
}

HermMat HermMat::symmetrized(const CMat& a) {
  if (a.rows() != a.cols())
    throw DimensionError("HermMat::symmetrized: matrix is not square");
  HermMat h;
  h.a_ = 0.5 * (a + a.adjoint());
  return h;
}

HermMat HermMat::identity(Index n) {
  HermMat h;
  h.a_ = CMat::Identity(n, n);
  return h;
}

HermMat HermMat::zero(Index n) {
  HermMat h;
  h.a_ = CMat::Zero(n, n);
  return h;
}

HermMat HermMat::diagonal(const RVec& d) {
  HermMat h;
  h.a_ = d.cast<Complex>().asDiagonal();
  return h;
}

EigDecomp herm_eig(const HermMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat());
  if (es.info() != Eigen::Success)
    throw NumericalError("herm_eig: eigensolver did not converge");
  // Eigen returns ascending order.
  EigDecomp d;
  d.lambdas = es.eigenvalues().reverse();
  d.U = es.eigenvectors().rowwise().reverse();
  return d;
}

namespace {

double psd_floor(const RVec& lambdas, double tol, const char* who) {
  const double top = lambdas.size() ? std::max(lambdas(0), 0.0) : 0.0;
  if (lambdas.size() && lambdas(lambdas.size() - 1) < -tol * top)
    throw DomainError(std::string(who) + ": matrix is indefinite (min eigenvalue " +
                      std::to_string(lambdas(lambdas.size() - 1)) + ")");
  return tol * top;
}

HermMat from_spectrum(const EigDecomp& d, const RVec& values) {
  return HermMat::symmetrized(d.U * values.cast<Complex>().asDiagonal() *
                              d.U.adjoint());
}

}  // namespace

HermMat pinv_psd(const HermMat& a, double tol) {
  if (!(tol > 0)) throw PreconditionError("pinv_psd: tol must be positive");
  const EigDecomp d = herm_eig(a);
  const double cut = psd_floor(d.lambdas, tol, "pinv_psd");
  RVec inv(d.lambdas.size());
  for (Index k = 0; k < inv.size(); ++k)
    inv(k) = d.lambdas(k) > cut && d.lambdas(k) > 0 ? 1.0 / d.lambdas(k) : 0.0;
  return from_spectrum(d, inv);
}

HermMat sqrt_psd(const HermMat& a) {
  const EigDecomp d = herm_eig(a);
  psd_floor(d.lambdas, kRankTol, "sqrt_psd");
  return from_spectrum(d, d.lambdas.cwiseMax(0.0).cwiseSqrt());
}

HermMat inv_sqrt_pd(const HermMat& a) {
  const EigDecomp d = herm_eig(a);
  if (d.lambdas.size() == 0) return a;
  if (!(d.lambdas(d.lambdas.size() - 1) > 0))
    throw DomainError("inv_sqrt_pd: matrix is not positive definite");
  return from_spectrum(d, d.lambdas.cwiseSqrt().cwiseInverse());
}

HermMat inverse_pd(const HermMat& a) {
  return HermMat::symmetrized(solve_pd(a, CMat::Identity(a.order(), a.order())));
}

CMat solve_pd(const HermMat& a, const CMat& b) {
  if (b.rows() != a.order()) throw DimensionError("solve_pd: row mismatch");
  Eigen::LLT<CMat> llt(a.mat());
  if (llt.info() != Eigen::Success)
    throw NumericalError("solve_pd: matrix is not numerically positive definite");
  return llt.solve(b);
}

double log_det_pd(const HermMat& a) {
  Eigen::LLT<CMat> llt(a.mat());
  if (llt.info() != Eigen::Success)
    throw NumericalError("log_det_pd: matrix is not numerically positive definite");
  const CMat& l = llt.matrixLLT();
  double s = 0.0;
  for (Index k = 0; k < l.rows(); ++k) s += std::log(l(k, k).real());
  return 2.0 * s;
}

double min_eig(const HermMat& a) {
  if (a.order() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const HermMat& a) {
  if (a.order() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.order() - 1);
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec vec(const CMat& a) {
  return Eigen::Map<const CVec>(a.data(), a.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

HermMat block_diag(std::span<const HermMat> blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.order();
  CMat out = CMat::Zero(n, n);
  Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.order(), b.order()) = b.mat();
    off += b.order();
  }
  return HermMat::symmetrized(out);
}

}  // namespace sensorbf
