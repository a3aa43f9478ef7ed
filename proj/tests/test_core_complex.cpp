#include <gtest/gtest.h>

#include "nonpsd/core_complex.hpp"
#include "support.hpp"

using namespace nonpsd;
using nonpsd::testing::random_cmat;
using nonpsd::testing::random_cvec;

namespace {

const double kPs[] = {1.0, 1.5, 2.0, 3.0, kInf};

}  // namespace

TEST(Svd, IdentityHasUnitSingularValues) {
  const Svd s = svd(CMat::Identity(3, 3));
  EXPECT_NEAR((s.sigma - RVec::Ones(3)).norm(), 0.0, 1e-14);
}

TEST(Svd, DiagonalModulus) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = cplx(0, 2);
  const Svd s = svd(m);
  EXPECT_NEAR(s.sigma(0), 2.0, 1e-14);
  EXPECT_NEAR(s.sigma(1), 0.0, 1e-14);
}

TEST(Svd, RandomReconstructionAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMat m = random_cmat(5, 3, seed);
    const Svd s = svd(m);
    const CMat rec = s.u * s.sigma.cast<cplx>().asDiagonal() * s.vstar;
    EXPECT_LE((m - rec).cwiseAbs().maxCoeff(), 1e-10 * spectral_norm(m));
    EXPECT_LE((s.u.adjoint() * s.u - CMat::Identity(3, 3)).norm(), 1e-12);
    EXPECT_LE((s.vstar * s.vstar.adjoint() - CMat::Identity(3, 3)).norm(), 1e-12);
    for (Index i = 1; i < s.sigma.size(); ++i) EXPECT_GE(s.sigma(i - 1), s.sigma(i));
  }
}

TEST(Svd, RejectsNonFinite) {
  CMat m = CMat::Ones(2, 2);
  m(1, 0) = cplx(std::nan(""), 0.0);
  try {
    svd(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(Qr, OrthonormalInputGivesPhaseDiagonal) {
  const CMat q0 = svd(random_cmat(6, 3, 4)).u;
  const Qr f = qr(q0);
  for (Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(std::abs(f.r(i, i)), 1.0, 1e-12);
    for (Index j = i + 1; j < 3; ++j) EXPECT_NEAR(std::abs(f.r(i, j)), 0.0, 1e-12);
  }
}

TEST(Qr, RealRandomIsOrthonormal) {
  const CMat m = nonpsd::testing::random_rmat(4, 2, 9).cast<cplx>();
  const Qr f = qr(m);
  EXPECT_LE((f.q.adjoint() * f.q - CMat::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE((f.q * f.r - m).norm(), 1e-12 * m.norm());
  EXPECT_NEAR(std::abs(f.r(1, 0)), 0.0, 0.0);
}

TEST(Qr, DuplicatedColumnShowsZeroPivot) {
  CMat m(4, 2);
  m.col(0) = random_cvec(4, 3);
  m.col(1) = m.col(0);
  const Qr f = qr(m);
  EXPECT_LE(std::abs(f.r(1, 1)), 1e-12 * std::abs(f.r(0, 0)));
}

TEST(Lift, ScalarCases) {
  EXPECT_EQ(lift_scalar(cplx(0, 0)), Eigen::Matrix2d::Zero());
  EXPECT_EQ(lift_scalar(cplx(1, 0)), Eigen::Matrix2d::Identity());
  Eigen::Matrix2d i_block;
  i_block << 0, -1, 1, 0;
  EXPECT_EQ(lift_scalar(cplx(0, 1)), i_block);
  CVec x(1);
  x(0) = cplx(1, 1);
  const Eigen::Vector2d prod = lift_scalar(cplx(0, 1)) * phi(x);
  EXPECT_DOUBLE_EQ(prod(0), -1.0);
  EXPECT_DOUBLE_EQ(prod(1), 1.0);
}

TEST(Lift, RingHomomorphism) {
  Rng rng(77);
  for (int k = 0; k < 1000; ++k) {
    const cplx z(rng.normal(), rng.normal());
    const cplx w(rng.normal(), rng.normal());
    EXPECT_LE((lift_scalar(z * w) - lift_scalar(z) * lift_scalar(w)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((lift_scalar(z + w) - lift_scalar(z) - lift_scalar(w)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Phi, InterleavesAndRoundTrips) {
  CVec v(1);
  v(0) = cplx(1, 2);
  EXPECT_EQ(phi(v), Eigen::Vector2d(1, 2));
  EXPECT_EQ(phi(CVec::Zero(3)), RVec::Zero(6));
  const CVec r = random_cvec(7, 5);
  EXPECT_EQ(unphi(phi(r)), r);
}

TEST(Phi, OddLengthUnphiThrows) { EXPECT_THROW(unphi(RVec::Zero(3)), Error); }

TEST(LiftMatrix, SmallCases) {
  CMat one(1, 1);
  one(0, 0) = 1.0;
  EXPECT_EQ(lift_matrix(one), RMat::Identity(2, 2));
  CMat i1(1, 1);
  i1(0, 0) = cplx(0, 1);
  CVec x(1);
  x(0) = 1.0;
  EXPECT_EQ(RVec(lift_matrix(i1) * phi(x)), Eigen::Vector2d(0, 1));
}

TEST(LiftMatrix, BlocksAreLiftedEntries) {
  const CMat a = random_cmat(3, 2, 8);
  const RMat l = lift_matrix(a);
  ASSERT_EQ(l.rows(), 6);
  ASSERT_EQ(l.cols(), 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 2; ++j) EXPECT_EQ(RMat(l.block(2 * i, 2 * j, 2, 2)), RMat(lift_scalar(a(i, j))));
}

TEST(LiftMatrix, NormIdentityOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CMat a = random_cmat(6, 3, seed);
    const CVec x = random_cvec(3, seed + 100);
    const CVec b = random_cvec(6, seed + 200);
    for (double p : kPs) {
      const double lhs = mixed_norm(lift_matrix(a) * phi(x) - phi(b), p);
      const double rhs = complex_pnorm(a * x - b, p);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
    }
  }
}

TEST(MixedNorm, HandValues) {
  EXPECT_DOUBLE_EQ(mixed_norm(Eigen::Vector4d(3, 4, 0, 0), 1.0), 5.0);
  EXPECT_DOUBLE_EQ(mixed_norm(Eigen::Vector4d(3, 4, 5, 12), kInf), 13.0);
  EXPECT_NEAR(mixed_norm(Eigen::Vector4d(3, 4, 5, 12), 2.0), std::sqrt(25.0 + 169.0), 1e-14);
}

TEST(MixedNorm, MatchesComplexNormOfPhi) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CVec v = random_cvec(9, seed);
    for (double p : kPs) {
      double direct = 0.0;
      if (std::isinf(p)) {
        for (Index i = 0; i < v.size(); ++i) direct = std::max(direct, std::abs(v(i)));
      } else {
        for (Index i = 0; i < v.size(); ++i) direct += std::pow(std::abs(v(i)), p);
        direct = std::pow(direct, 1.0 / p);
      }
      EXPECT_NEAR(mixed_norm(phi(v), p), direct, 1e-12 * direct);
    }
  }
}

TEST(MixedNorm, RejectsOddLengthAndBadP) {
  EXPECT_THROW(mixed_norm(RVec::Ones(3), 2.0), Error);
  EXPECT_THROW(mixed_norm(RVec::Ones(4), 0.5), Error);
}

TEST(SpectralNorm, HandValuesAndPowerIteration) {
  EXPECT_NEAR(spectral_norm(CMat(CMat::Identity(4, 4))), 1.0, 1e-14);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = cplx(0, 3);
  EXPECT_NEAR(spectral_norm(d), 3.0, 1e-14);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CMat m = random_cmat(7, 4, seed);
    EXPECT_NEAR(spectral_norm(m), nonpsd::testing::power_iteration_norm(m, seed + 50), 1e-8);
  }
}

TEST(SpectralNorm, TransposeInvariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CMat m = random_cmat(5, 3, seed);
    const double s = spectral_norm(m);
    EXPECT_NEAR(spectral_norm(CMat(m.adjoint())), s, 1e-12 * s);
    EXPECT_NEAR(spectral_norm(CMat(m.transpose())), s, 1e-12 * s);
  }
}

TEST(MinEig, HandValuesAndPsd) {
  EXPECT_NEAR(min_eig_hermitian(CMat(CMat::Identity(3, 3))), 1.0, 1e-14);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = -2.0;
  d(1, 1) = 5.0;
  EXPECT_NEAR(min_eig_hermitian(d), -2.0, 1e-14);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CMat x = random_cmat(3, 6, seed);
    EXPECT_GE(min_eig_hermitian(CMat(x.adjoint() * x)), -1e-10);
  }
}

TEST(MinEig, RejectsNonHermitian) {
  CMat m = CMat::Identity(2, 2);
  m(0, 1) = 1.0;
  try {
    min_eig_hermitian(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(ComplexPnorm, Cases) {
  CVec v(2);
  v << cplx(3, 4), cplx(0, 1);
  EXPECT_DOUBLE_EQ(complex_pnorm(v, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(complex_pnorm(v, kInf), 5.0);
}
