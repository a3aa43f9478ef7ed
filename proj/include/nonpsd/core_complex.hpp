#pragma once

// Dense complex linear algebra primitives and the complex -> real lifting maps.
//
// Lifting convention: a complex scalar z = c + di lifts to the 2x2 real block
// [[c, -d], [d, c]] and a complex vector to interleaved (re, im) pairs. With this
// convention lift(y) * phi(x) = phi(y * x), so
//     mixed_norm(lift_matrix(A) * phi(x) - phi(b), p) == ||A x - b||_p
// holds with no conjugation.

#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "nonpsd/error.hpp"

namespace nonpsd {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerances {
  double reconstruction = 1e-10;
  double orthonormality = 1e-12;
  double hermitian = 1e-10;
};

struct Svd {
  CMat u;       // rows x k, orthonormal columns
  RVec sigma;   // k = min(rows, cols), descending
  CMat vstar;   // k x cols
};

struct Qr {
  CMat q;  // rows x cols, orthonormal columns
  CMat r;  // cols x cols, upper triangular
};

/// Thin SVD. Throws ErrorCode::InvalidInput on non-finite entries.
Svd svd(const CMat& m);

/// Thin Householder QR; requires rows >= cols. Rank-deficient input still
/// factors; the zero pivots show up on the diagonal of r.
Qr qr(const CMat& m);

/// Numerical rank from a descending singular value list.
Index numerical_rank(const RVec& sigma, Index rows, Index cols);

Eigen::Matrix2d lift_scalar(cplx z);
RVec phi(const CVec& v);
CVec unphi(const RVec& v);
RMat lift_matrix(const CMat& a);

/// l_p norm of the per-pair Euclidean norms of an even-length real vector.
/// p in [1, inf]; pass kInf for the max-norm.
double mixed_norm(const RVec& y, double p);

/// Complex l_p norm (moduli), p in [1, inf].
double complex_pnorm(const CVec& v, double p);

double spectral_norm(const CMat& m);
double spectral_norm(const RMat& m);

/// Smallest eigenvalue of a Hermitian matrix. Throws InvalidInput when
/// max|M - M*| exceeds tol * max(1, max|M|).
double min_eig_hermitian(const CMat& m, double tol = Tolerances{}.hermitian);
double min_eig_hermitian(const RMat& m, double tol = Tolerances{}.hermitian);

void require_finite(const CMat& m, const char* what);
void require_finite(const RMat& m, const char* what);

}  // namespace nonpsd
