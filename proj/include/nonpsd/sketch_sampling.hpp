#pragma once

// Leverage scores (exact and fast-approximate) and weighted row-sampling sketches.

#include <cstdint>
#include <vector>

#include "nonpsd/core_complex.hpp"

namespace nonpsd {

/// Non-negative per-row scores; probabilities when normalized.
struct ScoreVector {
  RVec values;

  Index size() const { return values.size(); }
  double total() const { return values.sum(); }
  /// Divides by the total. Throws InvalidInput if the total is not positive.
  ScoreVector normalized() const;
};

struct Pick {
  Index row = 0;
  double weight = 0.0;
};

/// S = R * Omega^T stored as (row, weight) pairs; S*B has rows weight * B_row.
struct SamplingSketch {
  Index source_rows = 0;
  std::vector<Pick> picks;

  Index size() const { return static_cast<Index>(picks.size()); }
};

/// l_i = ||U_i||^2 over the numerical-rank columns of the thin SVD.
ScoreVector exact_leverage_scores(const CMat& b);
ScoreVector exact_leverage_scores(const RMat& b);

struct ApproxLeverageOptions {
  Index embed_rows = 0;        // s; 0 selects embed_factor * d
  Index jl_cols = 0;           // r; 0 selects ceil(jl_log_factor * ln n)
  double embed_factor = 16.0;
  double jl_log_factor = 8.0;
};

/// Fast approximation: Gaussian embedding S (streamed, never stored), QR of
/// S*B = Q * R^{-1}, then l~_i = ||e_i^T B R G||^2 with G ~ N(0, 1/r).
/// Throws RankDeficient when S*B is numerically singular.
ScoreVector approx_leverage_scores(const CMat& b, std::uint64_t seed,
                                   const ApproxLeverageOptions& opts = {});
ScoreVector approx_leverage_scores(const RMat& b, std::uint64_t seed,
                                   const ApproxLeverageOptions& opts = {});
ScoreVector approx_leverage_scores(const CMat& b, Index embed_rows, Index jl_cols,
                                   std::uint64_t seed);

/// t i.i.d. picks with replacement; row i has weight 1/sqrt(t p_i).
SamplingSketch build_sampling_sketch(const ScoreVector& probs, Index t, std::uint64_t seed);

CMat apply_sketch(const SamplingSketch& sketch, const CMat& b);
RMat apply_sketch(const SamplingSketch& sketch, const RMat& b);

/// gamma = || sum_i (||B_i||^2 / l~_i) B_i^* B_i ||.
double gamma_factor(const CMat& b, const ScoreVector& approx_scores);

/// ceil(c d log(d/delta) / eps^2): row count for the Loewner sandwich.
Index lowner_sample_count(Index d, double eps, double delta, double c = 4.0);
/// ceil(c d gamma log(d/delta) / eps^2): row count for the spectral bound.
Index spectral_sample_count(Index d, double gamma, double eps, double delta, double c = 4.0);

}  // namespace nonpsd
