#include "nonpsd/core_complex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nonpsd {

void require_finite(const CMat& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
  }
}

void require_finite(const RMat& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
  }
}

Svd svd(const CMat& m) {
  require_finite(m, "svd");
  Svd out;
  if (m.size() == 0) {
    out.u = CMat(m.rows(), 0);
    out.vstar = CMat(0, m.cols());
    return out;
  }
  Eigen::BDCSVD<CMat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = dec.matrixU();
  out.sigma = dec.singularValues();
  out.vstar = dec.matrixV().adjoint();
  return out;
}

Qr qr(const CMat& m) {
  if (m.rows() < m.cols()) {
    throw Error(ErrorCode::InvalidInput, "qr: requires rows >= cols");
  }
  require_finite(m, "qr");
  Eigen::HouseholderQR<CMat> dec(m);
  Qr out;
  out.q = dec.householderQ() * CMat::Identity(m.rows(), m.cols());
  out.r = dec.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  return out;
}

Index numerical_rank(const RVec& sigma, Index rows, Index cols) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cutoff =
      sigma(0) * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  return rank;
}

Eigen::Matrix2d lift_scalar(cplx z) {
  Eigen::Matrix2d out;
  out << z.real(), -z.imag(),
         z.imag(), z.real();
  return out;
}

RVec phi(const CVec& v) {
  RVec out(2 * v.size());
  for (Index j = 0; j < v.size(); ++j) {
    out(2 * j) = v(j).real();
    out(2 * j + 1) = v(j).imag();
  }
  return out;
}

CVec unphi(const RVec& v) {
  if (v.size() % 2 != 0) {
    throw Error(ErrorCode::InvalidInput, "unphi: odd length");
  }
  CVec out(v.size() / 2);
  for (Index j = 0; j < out.size(); ++j) out(j) = cplx(v(2 * j), v(2 * j + 1));
  return out;
}

RMat lift_matrix(const CMat& a) {
  RMat out(2 * a.rows(), 2 * a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block<2, 2>(2 * i, 2 * j) = lift_scalar(a(i, j));
    }
  }
  return out;
}

namespace {

template <typename Moduli>
double pnorm_of_moduli(Index count, Moduli modulus, double p) {
  if (!(p >= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "norm order must satisfy p >= 1");
  }
  if (std::isinf(p)) {
    double best = 0.0;
    for (Index i = 0; i < count; ++i) best = std::max(best, modulus(i));
    return best;
  }
  // Scale by the max modulus so large p does not overflow.
  double scale = 0.0;
  for (Index i = 0; i < count; ++i) scale = std::max(scale, modulus(i));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < count; ++i) acc += std::pow(modulus(i) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

}  // namespace

double mixed_norm(const RVec& y, double p) {
  if (y.size() % 2 != 0) {
    throw Error(ErrorCode::InvalidInput, "mixed_norm: odd length");
  }
  return pnorm_of_moduli(
      y.size() / 2, [&](Index i) { return std::hypot(y(2 * i), y(2 * i + 1)); }, p);
}

double complex_pnorm(const CVec& v, double p) {
  return pnorm_of_moduli(v.size(), [&](Index i) { return std::abs(v(i)); }, p);
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  const Svd s = svd(m);
  return s.sigma(0);
}

double spectral_norm(const RMat& m) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "spectral_norm");
  Eigen::BDCSVD<RMat> dec(m);
  return dec.singularValues()(0);
}

namespace {

template <typename Mat>
double min_eig_impl(const Mat& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidInput, "min_eig_hermitian: matrix is not square");
  }
  require_finite(m, "min_eig_hermitian");
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw Error(ErrorCode::InvalidInput, "min_eig_hermitian: matrix is not Hermitian");
  }
  const Mat sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace

double min_eig_hermitian(const CMat& m, double tol) { return min_eig_impl(m, tol); }
double min_eig_hermitian(const RMat& m, double tol) { return min_eig_impl(m, tol); }

}  // namespace nonpsd
