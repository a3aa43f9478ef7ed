#pragma once

// Row-sampling probability schemes for sub-sampled Hessians.

#include <string>
#include <string_view>

#include "nonpsd/hessian_oracle.hpp"

namespace nonpsd {

enum class Scheme { Full, Uniform, LS, RN, LSMX, RNMX, LSDet };

std::string_view scheme_name(Scheme scheme) noexcept;
/// Accepts Full, Uniform, LS, RN, LS-MX, RN-MX, LS-Det (case-sensitive). Throws Config.
Scheme parse_scheme(std::string_view name);

struct SchemeProbabilities {
  ScoreVector probs;              // normalized, length n
  bool uniform_fallback = false;  // every score was zero
};

/// Probabilities from A and a precomputed D = f''(A x). Leverage-based schemes
/// work on |D|^{1/2} A in real arithmetic. Charges 2 score-product units per
/// leverage computation (LS: 2, LS-MX: 4, row-norm schemes: 0).
/// Full and LS-Det are not sampling distributions and throw InvalidInput.
SchemeProbabilities scheme_probabilities(const RMat& a, const RVec& dvals, Scheme scheme,
                                         OracleMeter* meter = nullptr);

/// Same, evaluating D(x) first (one extra unit).
SchemeProbabilities scheme_probabilities(const FiniteSumProblem& problem, const RVec& x,
                                         Scheme scheme, OracleMeter* meter = nullptr);

/// diag(|D|^{1/2}) A.
RMat abs_sqrt_scaled(const RMat& a, const RVec& dvals);

/// Units charged by one leverage-score computation on an n x d operand.
inline constexpr std::int64_t kLeverageUnits = 2 * OracleMeter::kScoreProductUnits;

}  // namespace nonpsd
