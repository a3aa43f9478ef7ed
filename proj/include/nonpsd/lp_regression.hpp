#pragma once

// Complex l_p regression by lifting to a real (p,2) mixed-norm problem and
// sketching each coordinate pair with a Gaussian block (finite p) or a
// Gaussian block composed with sign enumeration (p = inf).

#include <cstdint>
#include <vector>

#include "nonpsd/sketch_sampling.hpp"

namespace nonpsd {

struct LiftedRegression {
  RMat ap;  // 2n x 2d
  RVec bp;  // 2n; pair i occupies rows (2i, 2i+1)

  Index pairs() const { return bp.size() / 2; }
};

LiftedRegression lift_instance(const CMat& a, const CVec& b);

struct LpScoreOptions {
  Index embed_rows = 0;  // 0: exact orthonormal basis from the SVD
  std::uint64_t seed = 0;
};

/// ||U_i||_p^p for a well-conditioned basis U of span(M). p in [1, inf).
ScoreVector lp_leverage_scores(const RMat& m, double p, const LpScoreOptions& opts = {});

/// gamma = d^{-1/q - 1}, 1/p + 1/q = 1; d is the complex column count.
double heavy_threshold(Index d, double p);

struct PairPartition {
  std::vector<Index> heavy;
  std::vector<Index> light;
  std::vector<char> is_heavy;  // per pair

  Index pairs() const { return static_cast<Index>(is_heavy.size()); }
  static PairPartition all_heavy(Index pairs);
};

/// Pair i is heavy iff row 2i or row 2i+1 has score >= gamma.
PairPartition classify_pairs(const ScoreVector& row_scores, Index d, double p);

/// Block-diagonal sketch: block i maps the two rows of pair i to blocks[i].rows() rows.
struct BlockSketch {
  std::vector<RMat> blocks;  // each r_i x 2

  Index pairs() const { return static_cast<Index>(blocks.size()); }
  Index rows() const;
  RMat apply(const RMat& m) const;
  RVec apply(const RVec& v) const;
  RMat dense() const;
};

/// sigma_p = (sqrt(pi) / (2^{p/2} Gamma((p+1)/2)))^{1/p}, so that
/// E|<g, y>|^p = ||y||_2^p for g with i.i.d. N(0, sigma_p^2) entries.
double gaussian_moment_scale(double p);

/// Light pairs: 1 x 2 block, entries N(0, sigma_p^2). Heavy pairs: t x 2
/// block with the same entries scaled by t^{-1/p}.
BlockSketch build_sketch_finite_p(const PairPartition& partition, Index t, double p, std::uint64_t seed);

/// 2^s x s matrix whose rows enumerate every sign pattern.
RMat sign_enumeration(Index s);

/// Every pair gets R * G with G in R^{s x 2}, entries N(0, pi/2) / s.
/// Throws Budget for s > 20 and InvalidInput for s < 1.
BlockSketch build_sketch_inf(Index pairs, Index s, std::uint64_t seed);

struct LpSolveOptions {
  double tol = 1e-10;          // relative objective tolerance
  Index group_size = 1;        // 1: plain l_p; 2: mixed (p,2) over consecutive pairs
  Index max_iterations = 1000;
  double smoothing_floor = 1e-8;
};

struct LpSolveResult {
  RVec y;
  double objective = 0.0;  // exact, unsmoothed norm of M y - c
  bool converged = false;
  Index iterations = 0;
};

/// damped Newton on the eps-smoothed norm with eps shrinking to a floor; p = inf: log-sum-exp
/// damped IRLS with a decreasing smoothing floor; p = inf: log-sum-exp
/// homotopy with Newton steps. Returns the best iterate seen.
LpSolveResult small_lp_solve(const RMat& m, const RVec& c, double p, const LpSolveOptions& opts = {});

/// Residual norm used by small_lp_solve for the given group size.
double grouped_norm(const RVec& r, double p, Index group_size);

struct SketchSolveParams {
  Index t = 0;               // heavy block rows (finite p); 0 selects the default
  Index s = 4;               // Gaussian rows per pair for p = inf
  bool all_heavy = true;
  bool identity_sketch = false;  // solve the lifted mixed-norm problem unsketched
  double epsilon = 0.5;      // used only by the default t
  std::uint64_t seed = 0;
  LpSolveOptions solver{};
};

struct SketchSolveResult {
  CVec xhat;
  double sketched_objective = 0.0;
  bool converged = false;
  Index heavy_pairs = 0;
  Index sketch_rows = 0;
};

/// max(8, ceil(4 d log(2/eps) / eps^2)).
Index default_heavy_rows(Index d, double eps);

SketchSolveResult sketch_and_solve(const CMat& a, const CVec& b, double p, const SketchSolveParams& params);

}  // namespace nonpsd
