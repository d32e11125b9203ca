#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sgstab/matrix.hpp"

namespace sgstab {

using Complex = std::complex<double>;

/// Eigenvalues sorted by descending real part, ties by ascending imaginary part.
using Spectrum = std::vector<Complex>;

namespace tolerance {
/// Pivots below this multiple of the max-norm of the input are treated as zero.
inline constexpr double lu_pivot = 1e-14;
/// Relative asymmetry accepted by the Cholesky factorization.
inline constexpr double cholesky_symmetry = 1e-12;
/// Total QR sweeps allowed per matrix dimension in the nonsymmetric eigensolver.
inline constexpr int qr_sweeps_per_dimension = 30;
/// QL sweeps allowed per eigenvalue in the symmetric tridiagonal eigensolver.
inline constexpr int ql_sweeps_per_eigenvalue = 60;
}  // namespace tolerance

/// LU factorization with partial pivoting, PA = LU packed into one matrix.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  Matrix solve(const Matrix& b) const;
  Vector solve(std::span<const double> b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

Matrix lu_solve(const Matrix& a, const Matrix& b);
Vector lu_solve(const Matrix& a, std::span<const double> b);

/// Lower-triangular L with positive diagonal such that M = L Lᵀ.
Matrix cholesky(const Matrix& m);

/// Inverse of a nonsingular lower-triangular matrix by forward substitution.
Matrix lower_triangular_inverse(const Matrix& l);

/// All eigenvalues of a real square matrix: Householder reduction to upper
/// Hessenberg form followed by Francis double-shift QR.
Spectrum eigenvalues(const Matrix& a);

/// max Re(λ) over the spectrum; the matrix is stable iff this is negative.
double spectral_abscissa(const Matrix& a);
bool is_stable(const Matrix& a);

/// ½(A + Aᵀ), mirrored so the result is bitwise symmetric.
Matrix symmetric_part(const Matrix& a);

/// Solves AᵀM + MA + Q = 0 through the Kronecker form
/// (I⊗Aᵀ + Aᵀ⊗I)·vec(M) = −vec(Q). The result is symmetrized.
Matrix lyapunov_solve(const Matrix& a, const Matrix& q);

struct TridiagonalEigen {
  Vector values;           // ascending
  Vector first_components; // first entry of each normalized eigenvector
};

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (length n−1) by implicit-shift QL.
TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal,
                                             std::span<const double> offdiagonal);

}  // namespace sgstab
