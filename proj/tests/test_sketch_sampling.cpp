#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nonpsd/schemes.hpp"
#include "nonpsd/sketch_sampling.hpp"
#include "support.hpp"

using namespace nonpsd;
using nonpsd::testing::indefinite_family;
using nonpsd::testing::leverage_oracle;
using nonpsd::testing::random_cmat;
using nonpsd::testing::random_rmat;

namespace {

ScoreVector uniform_probs(Index n) { return ScoreVector{RVec::Constant(n, 1.0 / static_cast<double>(n))}; }

CMat sketched_real_gram(const SamplingSketch& s, const CMat& b) {
  const CMat c = apply_sketch(s, b);
  return c.transpose() * c;
}

}  // namespace

TEST(ExactLeverage, IdentityAllOnes) {
  const ScoreVector s = exact_leverage_scores(CMat(CMat::Identity(4, 4)));
  EXPECT_LE((s.values - RVec::Ones(4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ExactLeverage, HugeRowDoesNotHideSmallOne) {
  RMat b = RMat::Zero(2, 2);
  b(0, 0) = 1e8;
  b(1, 1) = 1.0;
  const ScoreVector s = exact_leverage_scores(b);
  EXPECT_NEAR(s.values(0), 1.0, 1e-12);
  EXPECT_NEAR(s.values(1), 1.0, 1e-12);
}

TEST(ExactLeverage, MatchesPseudoinverseOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMat b = random_cmat(6, 2, seed);
    const ScoreVector s = exact_leverage_scores(b);
    EXPECT_LE((s.values - leverage_oracle(b)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ExactLeverage, RankDeficientInvariants) {
  CMat b = random_cmat(30, 5, 3);
  b.col(4) = b.col(0) + cplx(0, 2) * b.col(1);
  const ScoreVector s = exact_leverage_scores(b);
  EXPECT_GE(s.values.minCoeff(), 0.0);
  EXPECT_LE(s.values.maxCoeff(), 1.0 + 1e-8);
  EXPECT_NEAR(s.total(), 4.0, 1e-6);
  EXPECT_LE((s.values - leverage_oracle(b)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ExactLeverage, ZeroRowsGetZero) {
  RMat b = random_rmat(10, 3, 1);
  b.row(4).setZero();
  EXPECT_EQ(exact_leverage_scores(b).values(4), 0.0);
  EXPECT_EQ(exact_leverage_scores(RMat(RMat::Zero(5, 2))).total(), 0.0);
}

TEST(ExactLeverage, RealAbsPathMatchesComplexPath) {
  const auto fam = indefinite_family(60, 4, 11);
  const ScoreVector complex_scores = exact_leverage_scores(fam.b);
  const ScoreVector real_scores = exact_leverage_scores(abs_sqrt_scaled(fam.a, fam.dvals));
  EXPECT_LE((complex_scores.values - real_scores.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ApproxLeverage, OrthonormalColumnsFullEmbedding) {
  const CMat q = svd(random_cmat(100, 4, 2)).u;
  const ScoreVector exact = exact_leverage_scores(q);
  const ScoreVector approx = approx_leverage_scores(q, 100, 400, 7);
  const RVec ratio = approx.values.cwiseQuotient(exact.values);
  EXPECT_GE(ratio.minCoeff(), 0.5);
  EXPECT_LE(ratio.maxCoeff(), 1.6);
}

TEST(ApproxLeverage, DefaultsStayWithinHalfForMostRows) {
  Index inside = 0;
  Index total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMat b = random_cmat(200, 5, seed);
    const RVec ratio =
        approx_leverage_scores(b, seed + 1000).values.cwiseQuotient(exact_leverage_scores(b).values);
    for (Index i = 0; i < ratio.size(); ++i) inside += (ratio(i) >= 0.5 && ratio(i) <= 1.5);
    total += ratio.size();
  }
  EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.95);
}

TEST(ApproxLeverage, ReproducibleForSeed) {
  const RMat b = random_rmat(50, 3, 4);
  EXPECT_EQ(approx_leverage_scores(b, 5).values, approx_leverage_scores(b, 5).values);
  EXPECT_NE(approx_leverage_scores(b, 5).values, approx_leverage_scores(b, 6).values);
}

TEST(ApproxLeverage, RankDeficientThrows) {
  RMat b = random_rmat(40, 3, 8);
  b.col(2) = 2.0 * b.col(1);
  try {
    approx_leverage_scores(b, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(ApproxLeverage, TallInputNeverAllocatesSquare) {
  // An n x n intermediate would need hundreds of gigabytes here.
  const RMat b = random_rmat(200000, 2, 5);
  const ScoreVector s = approx_leverage_scores(b, 3);
  EXPECT_EQ(s.size(), 200000);
  EXPECT_NEAR(s.total(), 2.0, 0.6);
}

TEST(SamplingSketch, PointMass) {
  ScoreVector p{RVec::Zero(6)};
  p.values(3) = 1.0;
  const SamplingSketch s = build_sampling_sketch(p, 5, 9);
  ASSERT_EQ(s.size(), 5);
  for (const Pick& pk : s.picks) {
    EXPECT_EQ(pk.row, 3);
    EXPECT_NEAR(pk.weight, 1.0 / std::sqrt(5.0), 1e-15);
  }
}

TEST(SamplingSketch, UniformWeights) {
  const SamplingSketch s = build_sampling_sketch(uniform_probs(40), 10, 1);
  for (const Pick& pk : s.picks) EXPECT_NEAR(pk.weight, 2.0, 1e-14);
}

TEST(SamplingSketch, ZeroProbabilityRowsNeverPicked) {
  ScoreVector p{RVec::Zero(10)};
  p.values(1) = 0.25;
  p.values(7) = 0.75;
  const SamplingSketch s = build_sampling_sketch(p, 2000, 4);
  std::set<Index> rows;
  for (const Pick& pk : s.picks) rows.insert(pk.row);
  EXPECT_EQ(rows, (std::set<Index>{1, 7}));
}

TEST(SamplingSketch, ValidatesInput) {
  EXPECT_THROW(build_sampling_sketch(ScoreVector{RVec::Zero(3)}, 2, 0), Error);
  EXPECT_THROW(build_sampling_sketch(ScoreVector{RVec::Constant(3, 0.5)}, 2, 0), Error);
  EXPECT_THROW(build_sampling_sketch(uniform_probs(3), 0, 0), Error);
  ScoreVector neg{RVec::Constant(3, 0.5)};
  neg.values(0) = -0.5;
  neg.values(1) = 1.0;
  EXPECT_THROW(build_sampling_sketch(neg, 2, 0), Error);
}

TEST(SamplingSketch, Reproducible) {
  const ScoreVector p = exact_leverage_scores(random_rmat(30, 3, 2)).normalized();
  const SamplingSketch a = build_sampling_sketch(p, 17, 123);
  const SamplingSketch b = build_sampling_sketch(p, 17, 123);
  for (Index j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a.picks[j].row, b.picks[j].row);
    EXPECT_EQ(a.picks[j].weight, b.picks[j].weight);
  }
}

TEST(SamplingSketch, EmpiricalFrequenciesFollowProbabilities) {
  ScoreVector p{RVec(4)};
  p.values << 0.1, 0.2, 0.3, 0.4;
  const SamplingSketch s = build_sampling_sketch(p, 100000, 77);
  RVec counts = RVec::Zero(4);
  for (const Pick& pk : s.picks) counts(pk.row) += 1.0;
  counts /= 100000.0;
  EXPECT_LE((counts - p.values).cwiseAbs().maxCoeff(), 0.005);
}

TEST(SamplingSketch, MonteCarloUnbiased) {
  const CMat b = random_cmat(8, 3, 21);
  const ScoreVector p = exact_leverage_scores(b).normalized();
  const CMat target = b.transpose() * b;
  CMat mean = CMat::Zero(3, 3);
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) mean += sketched_real_gram(build_sampling_sketch(p, 4, derive_seed(5, k)), b);
  mean /= static_cast<double>(trials);
  EXPECT_LE((mean - target).norm(), 0.02 * target.norm());
}

TEST(ApplySketch, IdentityAndSinglePick) {
  const CMat b = random_cmat(4, 2, 6);
  SamplingSketch id{4, {}};
  for (Index i = 0; i < 4; ++i) id.picks.push_back({i, 1.0});
  EXPECT_EQ(apply_sketch(id, b), b);
  SamplingSketch one{4, {{0, 2.0}}};
  EXPECT_EQ(apply_sketch(one, b), CMat(2.0 * b.row(0)));
}

TEST(ApplySketch, GramIsWeightedSum) {
  const CMat b = random_cmat(9, 3, 12);
  const SamplingSketch s = build_sampling_sketch(uniform_probs(9), 6, 3);
  CMat sum = CMat::Zero(3, 3);
  for (const Pick& pk : s.picks) sum += pk.weight * pk.weight * b.row(pk.row).transpose() * b.row(pk.row);
  EXPECT_LE((sketched_real_gram(s, b) - sum).norm(), 1e-12 * sum.norm());
}

TEST(ApplySketch, RejectsBadRows) {
  const CMat b = random_cmat(4, 2, 6);
  EXPECT_THROW(apply_sketch(SamplingSketch{4, {{4, 1.0}}}, b), Error);
  EXPECT_THROW(apply_sketch(SamplingSketch{5, {{0, 1.0}}}, b), Error);
}

TEST(GammaFactor, OrthonormalIsOne) {
  const CMat q = svd(random_cmat(20, 3, 2)).u;
  EXPECT_NEAR(gamma_factor(q, exact_leverage_scores(q)), 1.0, 1e-10);
}

TEST(GammaFactor, DiagonalHandSum) {
  CMat b = CMat::Zero(2, 2);
  b(0, 0) = 2.0;
  b(1, 1) = 3.0;
  EXPECT_NEAR(gamma_factor(b, ScoreVector{RVec::Ones(2)}), 81.0, 1e-12);
}

TEST(GammaFactor, QuarticHomogeneity) {
  const CMat b = random_cmat(12, 3, 9);
  const ScoreVector s = exact_leverage_scores(b);
  const double g = gamma_factor(b, s);
  EXPECT_NEAR(gamma_factor(CMat(3.0 * b), s), 81.0 * g, 1e-9 * 81.0 * g);
}

TEST(GammaFactor, ZeroRowsIgnoredZeroScoresRejected) {
  CMat b = random_cmat(5, 2, 1);
  b.row(2).setZero();
  ScoreVector s = exact_leverage_scores(b);
  EXPECT_EQ(s.values(2), 0.0);
  EXPECT_NO_THROW(gamma_factor(b, s));
  s.values(0) = 0.0;
  EXPECT_THROW(gamma_factor(b, s), Error);
}

TEST(SampleCounts, Formulas) {
  EXPECT_EQ(lowner_sample_count(8, 0.5, 0.1), static_cast<Index>(std::ceil(4 * 8 * std::log(80.0) / 0.25)));
  EXPECT_EQ(spectral_sample_count(8, 2.0, 0.5, 0.1), static_cast<Index>(std::ceil(4 * 8 * 2 * std::log(80.0) / 0.25)));
}

TEST(SchemeProbabilities, IdentityDiagonalGivesLeverageOverD) {
  const RMat a = random_rmat(25, 4, 3);
  const SchemeProbabilities sp = scheme_probabilities(a, RVec::Ones(25), Scheme::LS);
  EXPECT_LE((sp.probs.values - exact_leverage_scores(a).values / 4.0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(sp.uniform_fallback);
}

TEST(SchemeProbabilities, ZeroDiagonalFallsBackToUniform) {
  const RMat a = random_rmat(10, 2, 3);
  for (Scheme s : {Scheme::LS, Scheme::RN}) {
    const SchemeProbabilities sp = scheme_probabilities(a, RVec::Zero(10), s);
    EXPECT_TRUE(sp.uniform_fallback);
    EXPECT_LE((sp.probs.values - RVec::Constant(10, 0.1)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SchemeProbabilities, DiagonalExample) {
  RMat a = RMat::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 0.5;
  RVec dv(2);
  dv << -2.0, 5.0;
  const RVec rn = scheme_probabilities(a, dv, Scheme::RN).probs.values;
  const RVec rnmx = scheme_probabilities(a, dv, Scheme::RNMX).probs.values;
  const Eigen::Vector2d rn_expect(2.0 * 9.0, 5.0 * 0.25);
  const Eigen::Vector2d rnmx_expect(3.0 + 2.0 * 3.0, 0.5 + 5.0 * 0.5);
  EXPECT_LE((rn - rn_expect / rn_expect.sum()).norm(), 1e-14);
  EXPECT_LE((rnmx - rnmx_expect / rnmx_expect.sum()).norm(), 1e-14);
  // Diagonal A: every leverage score is 1, so both leverage schemes are uniform.
  EXPECT_LE((scheme_probabilities(a, dv, Scheme::LS).probs.values - Eigen::Vector2d(0.5, 0.5)).norm(), 1e-14);
  EXPECT_LE((scheme_probabilities(a, dv, Scheme::LSMX).probs.values - Eigen::Vector2d(0.5, 0.5)).norm(), 1e-14);
}

TEST(SchemeProbabilities, MixedLeverageFormula) {
  const RMat a = random_rmat(30, 3, 4);
  const RVec dv = nonpsd::testing::random_rvec(30, 5);
  RVec expect = exact_leverage_scores(a).values + exact_leverage_scores(RMat(dv.asDiagonal() * a)).values;
  expect /= expect.sum();
  EXPECT_LE((scheme_probabilities(a, dv, Scheme::LSMX).probs.values - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SchemeProbabilities, ChargesScoreWork) {
  const RMat a = random_rmat(20, 2, 4);
  const RVec dv = RVec::Ones(20);
  auto units = [&](Scheme s) {
    OracleMeter m(20);
    scheme_probabilities(a, dv, s, &m);
    return m.row_evaluations() / 20;
  };
  EXPECT_EQ(units(Scheme::LS), kLeverageUnits);
  EXPECT_EQ(units(Scheme::LSMX), 2 * kLeverageUnits);
  EXPECT_EQ(units(Scheme::RN), 0);
  EXPECT_EQ(units(Scheme::RNMX), 0);
  EXPECT_EQ(units(Scheme::Uniform), 0);
  EXPECT_THROW(scheme_probabilities(a, dv, Scheme::Full), Error);
}

TEST(SchemeNames, RoundTrip) {
  for (Scheme s : {Scheme::Full, Scheme::Uniform, Scheme::LS, Scheme::RN, Scheme::LSMX, Scheme::RNMX, Scheme::LSDet}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_THROW(parse_scheme("ls"), Error);
}

TEST(LownerSandwich, HoldsInMostTrials) {
  const Index d = 8;
  const Index t = lowner_sample_count(d, 0.5, 0.1);
  int ok = 0;
  const int trials = 40;
  for (int k = 0; k < trials; ++k) {
    const auto fam = indefinite_family(500, d, derive_seed(1, k));
    const CMat btb = fam.b.transpose() * fam.b;
    const CMat bsb = fam.b.adjoint() * fam.b;
    const ScoreVector p = exact_leverage_scores(fam.b).normalized();
    const CMat ctc = sketched_real_gram(build_sampling_sketch(p, t, derive_seed(2, k)), fam.b);
    const CMat lo = ctc - btb + 0.5 * bsb;
    const CMat hi = btb + 0.5 * bsb - ctc;
    ok += min_eig_hermitian(CMat(0.5 * (lo + lo.adjoint()))) >= -1e-8 &&
          min_eig_hermitian(CMat(0.5 * (hi + hi.adjoint()))) >= -1e-8;
  }
  EXPECT_GE(ok, static_cast<int>(0.9 * trials));
}

TEST(LownerSandwich, TwiceOverestimatedScoresStillWork) {
  const Index d = 8;
  const Index t = lowner_sample_count(d, 0.5, 0.1);
  int ok = 0;
  const int trials = 40;
  for (int k = 0; k < trials; ++k) {
    const auto fam = indefinite_family(500, d, derive_seed(3, k));
    ScoreVector over = exact_leverage_scores(fam.b);
    for (Index i = 0; i < over.size(); i += 2) over.values(i) *= 2.0;
    const CMat btb = fam.b.transpose() * fam.b;
    const CMat bsb = fam.b.adjoint() * fam.b;
    const CMat ctc = sketched_real_gram(build_sampling_sketch(over.normalized(), t, derive_seed(4, k)), fam.b);
    const CMat lo = ctc - btb + 0.5 * bsb;
    const CMat hi = btb + 0.5 * bsb - ctc;
    ok += min_eig_hermitian(CMat(0.5 * (lo + lo.adjoint()))) >= -1e-8 &&
          min_eig_hermitian(CMat(0.5 * (hi + hi.adjoint()))) >= -1e-8;
  }
  EXPECT_GE(ok, static_cast<int>(0.9 * trials));
}
