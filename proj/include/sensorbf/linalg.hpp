#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sensorbf {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Relative eigenvalue threshold used for rank decisions and PSD checks.
inline constexpr double kRankTol = 1e-10;

/// Relative tolerance of the Hermitian check: max |A - A^H| <= tol * (1 + maxabs(A)).
inline constexpr double kHermitianTol = 1e-12;

/// Largest absolute entry deviation from Hermitian symmetry.
double hermitian_defect(const CMat& a);

bool is_hermitian(const CMat& a, double tol = kHermitianTol);

bool all_finite(const CMat& a);

/// A square complex matrix known to be Hermitian.
///
/// Construction from a general matrix validates the Hermitian invariant and
/// then stores the symmetrized matrix (A + A^H)/2, so the stored entries are
/// exactly Hermitian and the diagonal is exactly real.
class HermMat {
 public:
  HermMat() = default;

  /// Throws PreconditionError if `a` is not square, not finite or not
  /// Hermitian within kHermitianTol.
  explicit HermMat(const CMat& a);

  /// Symmetrizes without checking. Use for products that are Hermitian in
  /// exact arithmetic, e.g. G W G^H.
  static HermMat symmetrized(const CMat& a);

  static HermMat identity(Index n);
  static HermMat zero(Index n);
  static HermMat diagonal(const RVec& d);

  const CMat& mat() const { return a_; }
  Index order() const { return a_.rows(); }

  HermMat operator+(const HermMat& o) const { return symmetrized(a_ + o.a_); }
  HermMat operator*(double s) const { return symmetrized(a_ * s); }

 private:
  CMat a_;
};

/// Eigendecomposition A = U diag(lambdas) U^H with lambdas sorted descending.
struct EigDecomp {
  CMat U;
  RVec lambdas;
};

EigDecomp herm_eig(const HermMat& a);

/// Moore-Penrose pseudoinverse of a PSD matrix. Eigenvalues at or below
/// tol * maxeig are treated as zero. Throws DomainError when an eigenvalue
/// is below -tol * maxeig.
HermMat pinv_psd(const HermMat& a, double tol = kRankTol);

/// Principal square root of a PSD matrix (small negative eigenvalues within
/// kRankTol * maxeig are clamped to zero).
HermMat sqrt_psd(const HermMat& a);

/// A^{-1/2} for positive definite A. Throws DomainError when mineig <= 0.
HermMat inv_sqrt_pd(const HermMat& a);

/// Inverse of a positive definite matrix via Cholesky; throws
/// NumericalError when the factorization fails.
HermMat inverse_pd(const HermMat& a);

/// Solves A X = B for positive definite A.
CMat solve_pd(const HermMat& a, const CMat& b);

/// log det A for positive definite A, evaluated through a Cholesky factor.
double log_det_pd(const HermMat& a);

double min_eig(const HermMat& a);
double max_eig(const HermMat& a);

CMat kron(const CMat& a, const CMat& b);

/// Column-stacking vectorization.
CVec vec(const CMat& a);

/// Inverse of vec for a rows x cols matrix.
CMat unvec(const CVec& v, Index rows, Index cols);

HermMat block_diag(std::span<const HermMat> blocks);

}  // namespace sensorbf
