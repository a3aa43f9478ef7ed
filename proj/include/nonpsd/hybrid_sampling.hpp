#pragma once

// LS-Det: deterministic selection of high-leverage rows over a few rounds,
// then weighted random sampling of whatever is left.

#include <cstdint>
#include <vector>

#include "nonpsd/sketch_sampling.hpp"

namespace nonpsd {

enum class RemainderMode { Uniform, Leverage };

struct HybridParams {
  Index rounds = 1;             // T
  double threshold = 0.5;       // m; rows with score >= m are deterministic
  Index sample_count = 1;       // h; 0 keeps only the deterministic part
  RemainderMode mode = RemainderMode::Leverage;
  Index round_cap = 0;          // per-round |E_t| limit; 0 selects 2d
};

struct HybridPlan {
  std::vector<Index> deterministic_rows;  // E, in selection order
  SamplingSketch sampled;                 // picks index rows of B directly, never in E
  Index rounds = 1;
  double threshold = 0.5;
  RemainderMode mode = RemainderMode::Leverage;
  /// Set when the remainder became empty, or heavy rows were left behind
  /// because the cap was hit in the last round.
  bool saturated = false;
};

/// Throws InvalidInput for T < 1, m outside (0, inf), or h < 0.
HybridPlan ls_det_sample(const CMat& b, const HybridParams& params, std::uint64_t seed);
HybridPlan ls_det_sample(const RMat& b, const HybridParams& params, std::uint64_t seed);

/// sum_{i in E} B_i^T B_i + C^T C with C the weighted sampled rows. Real
/// transpose throughout, so for B = D^{1/2} A this targets A^T D A.
CMat hybrid_gram(const HybridPlan& plan, const CMat& b);
RMat hybrid_gram(const HybridPlan& plan, const RMat& b);

}  // namespace nonpsd
