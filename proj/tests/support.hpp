#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "nonpsd/core_complex.hpp"
#include "nonpsd/rng.hpp"

namespace nonpsd::testing {

inline RMat random_rmat(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  RMat m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

inline CMat random_cmat(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  CMat m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

inline RVec random_rvec(Index n, std::uint64_t seed) { return random_rmat(n, 1, seed).col(0); }
inline CVec random_cvec(Index n, std::uint64_t seed) { return random_cmat(n, 1, seed).col(0); }

// Dense pseudoinverse through a complete orthogonal decomposition, independent
// of the SVD path used by the library.
inline CMat pinv(const CMat& m) {
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(m);
  return cod.pseudoInverse();
}

inline RMat pinv(const RMat& m) {
  Eigen::CompleteOrthogonalDecomposition<RMat> cod(m);
  return cod.pseudoInverse();
}

// diag(B (B*B)^+ B*)
inline RVec leverage_oracle(const CMat& b) {
  const CMat gram_pinv = pinv(CMat(b.adjoint() * b));
  RVec out(b.rows());
  for (Index i = 0; i < b.rows(); ++i) {
    out(i) = (b.row(i) * gram_pinv * b.row(i).adjoint())(0, 0).real();
  }
  return out;
}

inline double power_iteration_norm(const CMat& m, std::uint64_t seed, int iters = 2000) {
  CVec v = random_cvec(m.cols(), seed);
  v.normalize();
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    CVec w = m.adjoint() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    est = std::sqrt(nw);
  }
  return est;
}

// B = D^{1/2} A with A real Gaussian (a few planted heavy rows) and D
// sign-indefinite, scaled so that ||B* B|| = 1.
struct IndefiniteFamily {
  RMat a;
  RVec dvals;
  CMat b;
};

inline IndefiniteFamily indefinite_family(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  IndefiniteFamily fam;
  fam.a = random_rmat(n, d, derive_seed(seed, 1));
  for (Index i = 0; i < d / 2; ++i) fam.a.row(static_cast<Index>(rng.below(n))) *= 20.0;
  fam.dvals.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double mag = 0.1 + std::abs(rng.normal());
    fam.dvals(i) = rng.uniform() < 0.3 ? -mag : mag;
  }
  fam.b.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    const cplx root = std::sqrt(cplx(fam.dvals(i), 0.0));
    fam.b.row(i) = root * fam.a.row(i).cast<cplx>();
  }
  const double scale = std::sqrt(spectral_norm(CMat(fam.b.adjoint() * fam.b)));
  fam.b /= scale;
  fam.a /= scale;
  return fam;
}

}  // namespace nonpsd::testing
