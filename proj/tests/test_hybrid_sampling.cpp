#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nonpsd/hybrid_sampling.hpp"
#include "support.hpp"

using namespace nonpsd;
using nonpsd::testing::random_cmat;
using nonpsd::testing::random_rmat;

namespace {

HybridParams params(double m, Index h, RemainderMode mode = RemainderMode::Leverage) {
  HybridParams p;
  p.threshold = m;
  p.sample_count = h;
  p.mode = mode;
  return p;
}

// Gaussian remainder plus `heavy` rows scaled far above it.
RMat planted(Index n, Index d, Index heavy, double scale, std::uint64_t seed) {
  RMat b = random_rmat(n, d, seed);
  for (Index i = 0; i < heavy; ++i) b.row(i * (n / heavy)) *= scale;
  return b;
}

// Gaussian remainder plus d heavy rows along orthogonal directions with
// squared norm 4n, so 2 ||B_N^T B_N|| <= ||sum_E B_i^T B_i|| holds.
RMat relaxed_rip(Index n, Index d, std::uint64_t seed) {
  RMat b = random_rmat(n, d, seed);
  const RMat basis = Eigen::HouseholderQR<RMat>(random_rmat(d, d, seed + 1)).householderQ();
  for (Index i = 0; i < d; ++i) b.row(i * (n / d)) = 2.0 * std::sqrt(static_cast<double>(n)) * basis.row(i);
  return b;
}

}  // namespace

TEST(LsDet, IdentityIsAllDeterministic) {
  const HybridPlan plan = ls_det_sample(CMat(CMat::Identity(5, 5)), params(0.5, 3), 1);
  EXPECT_EQ(plan.deterministic_rows.size(), 5u);
  EXPECT_EQ(plan.sampled.size(), 0);
  EXPECT_TRUE(plan.saturated);
}

TEST(LsDet, HugeRowLandsInDeterministicSet) {
  CMat b = random_cmat(101, 4, 3);
  b.row(57) *= 1e6;
  const HybridPlan plan = ls_det_sample(b, params(0.9, 20), 2);
  EXPECT_NE(std::find(plan.deterministic_rows.begin(), plan.deterministic_rows.end(), 57),
            plan.deterministic_rows.end());
}

TEST(LsDet, ThresholdAboveOneDegeneratesToPlainSampling) {
  const CMat b = random_cmat(40, 3, 5);
  const HybridPlan plan = ls_det_sample(b, params(1.0 + 1e-9, 25), 99);
  EXPECT_TRUE(plan.deterministic_rows.empty());
  const SamplingSketch plain = build_sampling_sketch(exact_leverage_scores(b).normalized(), 25, 99);
  ASSERT_EQ(plan.sampled.size(), plain.size());
  for (Index j = 0; j < plain.size(); ++j) {
    EXPECT_EQ(plan.sampled.picks[j].row, plain.picks[j].row);
    EXPECT_NEAR(plan.sampled.picks[j].weight, plain.picks[j].weight, 1e-12);
  }
}

TEST(LsDet, DeterministicAndSampledAreDisjoint) {
  const RMat b = planted(200, 4, 6, 50.0, 1);
  for (RemainderMode mode : {RemainderMode::Leverage, RemainderMode::Uniform}) {
    const HybridPlan plan = ls_det_sample(b, params(0.5, 300, mode), 7);
    ASSERT_FALSE(plan.deterministic_rows.empty());
    const std::set<Index> e(plan.deterministic_rows.begin(), plan.deterministic_rows.end());
    for (const Pick& pk : plan.sampled.picks) EXPECT_EQ(e.count(pk.row), 0u);
  }
}

TEST(LsDet, UniformRemainderWeights) {
  const RMat b = planted(200, 4, 6, 50.0, 1);
  const HybridPlan plan = ls_det_sample(b, params(0.5, 30, RemainderMode::Uniform), 7);
  const double n_rem = 200.0 - static_cast<double>(plan.deterministic_rows.size());
  for (const Pick& pk : plan.sampled.picks) EXPECT_NEAR(pk.weight, std::sqrt(n_rem / 30.0), 1e-12);
}

TEST(LsDet, PerRoundCapKeepsLargestScores) {
  const RMat b = planted(200, 4, 6, 50.0, 2);
  HybridParams p = params(0.5, 10);
  p.round_cap = 2;
  const HybridPlan plan = ls_det_sample(b, p, 1);
  ASSERT_EQ(plan.deterministic_rows.size(), 2u);
  EXPECT_TRUE(plan.saturated);
  const RVec scores = exact_leverage_scores(b).values;
  const double picked_min =
      std::min(scores(plan.deterministic_rows[0]), scores(plan.deterministic_rows[1]));
  Index above = 0;
  for (Index i = 0; i < scores.size(); ++i) above += scores(i) > picked_min;
  EXPECT_LE(above, 1);
}

TEST(LsDet, ZeroRowsStayInRemainder) {
  CMat b = CMat::Zero(12, 3);
  for (Index i = 0; i < 3; ++i) b(i, i) = 1.0;
  const HybridPlan plan = ls_det_sample(b, params(0.5, 4), 0);
  EXPECT_EQ(plan.deterministic_rows, (std::vector<Index>{0, 1, 2}));
  EXPECT_FALSE(plan.saturated);
  for (const Pick& pk : plan.sampled.picks) EXPECT_GE(pk.row, 3);
}

TEST(LsDet, MultipleRoundsPeelFurther) {
  RMat b = random_rmat(300, 3, 4);
  b.row(0) *= 1e4;
  b.row(1) *= 1e2;
  HybridParams p = params(0.5, 10);
  p.round_cap = 1;
  p.rounds = 1;
  const size_t one = ls_det_sample(b, p, 0).deterministic_rows.size();
  p.rounds = 3;
  const size_t three = ls_det_sample(b, p, 0).deterministic_rows.size();
  EXPECT_EQ(one, 1u);
  EXPECT_GE(three, 2u);
}

TEST(LsDet, DeterministicPartIndependentOfSeed) {
  const RMat b = planted(150, 3, 4, 30.0, 6);
  const auto e0 = ls_det_sample(b, params(0.5, 20), 1).deterministic_rows;
  for (std::uint64_t s = 2; s < 10; ++s) EXPECT_EQ(ls_det_sample(b, params(0.5, 20), s).deterministic_rows, e0);
}

TEST(LsDet, ValidatesParameters) {
  const RMat b = random_rmat(10, 2, 1);
  HybridParams p = params(0.5, 3);
  p.rounds = 0;
  EXPECT_THROW(ls_det_sample(b, p, 0), Error);
  EXPECT_THROW(ls_det_sample(b, params(0.0, 3), 0), Error);
  EXPECT_THROW(ls_det_sample(b, params(0.5, -1), 0), Error);
}

TEST(HybridGram, FullDeterministicIsExact) {
  const CMat b = CMat::Identity(4, 4) * cplx(2, 1);
  const HybridPlan plan = ls_det_sample(b, params(0.5, 5), 0);
  EXPECT_LE((hybrid_gram(plan, b) - CMat(b.transpose() * b)).norm(), 1e-10);
}

TEST(HybridGram, EmptyDeterministicEqualsSketchedGram) {
  const CMat b = random_cmat(30, 3, 8);
  const HybridPlan plan = ls_det_sample(b, params(2.0, 12), 4);
  const CMat c = apply_sketch(plan.sampled, b);
  EXPECT_LE((hybrid_gram(plan, b) - CMat(c.transpose() * c)).norm(), 1e-12 * c.squaredNorm());
}

TEST(HybridGram, BeatsPureSamplingOnRelaxedRipFamily) {
  const Index n = 400;
  const Index d = 5;
  const Index budget = 60;
  int wins = 0;
  for (int k = 0; k < 100; ++k) {
    const RMat b = relaxed_rip(n, d, derive_seed(10, k));
    const RMat exact = b.transpose() * b;
    const HybridPlan plan = ls_det_sample(b, params(0.5, 1), 0);
    const Index det = static_cast<Index>(plan.deterministic_rows.size());
    // Family condition: 2 ||B_N^T B_N|| <= ||sum_E B_i^T B_i||.
    RMat gram_e = RMat::Zero(d, d);
    for (Index i : plan.deterministic_rows) gram_e += b.row(i).transpose() * b.row(i);
    ASSERT_LE(2.0 * spectral_norm(RMat(exact - gram_e)), spectral_norm(gram_e));
    const HybridPlan hybrid = ls_det_sample(b, params(0.5, budget - det), derive_seed(11, k));
    const SamplingSketch pure = build_sampling_sketch(exact_leverage_scores(b).normalized(), budget, derive_seed(12, k));
    const RMat c = apply_sketch(pure, b);
    const double e_hybrid = spectral_norm(RMat(hybrid_gram(hybrid, b) - exact));
    const double e_pure = spectral_norm(RMat(c.transpose() * c - exact));
    wins += e_hybrid <= e_pure;
  }
  EXPECT_GE(wins, 70);
}
