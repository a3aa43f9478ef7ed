#pragma once

// Sub-sampled Newton-type methods: Newton-CG with Armijo backtracking,
// Newton-MR with the gradient-norm line search, and trust region with
// CG-Steihaug. All start from x0 = 0 and count cost in function evaluations.

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "nonpsd/hessian_oracle.hpp"
#include "nonpsd/krylov.hpp"
#include "nonpsd/schemes.hpp"

namespace nonpsd {

struct OptConfig {
  Scheme scheme = Scheme::Full;
  Index sample_size = 0;        // t; required for every scheme except Full
  double det_fraction = 0.0;    // LS-Det(f): round(f t) deterministic rows, rest sampled
  Index max_outer = 100;
  double max_oracle_calls = std::numeric_limits<double>::infinity();
  KrylovOptions inner{};        // cap 100, relative residual 1e-8
  double line_search_rho = 1e-4;
  Index max_halvings = 30;
  double tr_delta0 = 1.0;
  double tr_eta = 0.8;
  double tr_gamma = 1.2;
  double grad_tol = 1e-8;
  std::uint64_t seed = 0;
  bool record_iterates = false;

  /// Throws Config when a field is out of range.
  void validate(Index n) const;
};

enum class OptStatus { Converged, MaxIterations, BudgetExhausted, LineSearchFailed, RadiusUnderflow };

std::string_view status_name(OptStatus status) noexcept;

struct IterRecord {
  Index iter = 0;
  double oracle_calls = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step_or_radius = 0.0;  // line-search step for Newton-CG/MR, radius after update for TR
  bool accepted = true;
  bool degenerate = false;      // TR step with p = 0 and m(p) = 0
  bool uniform_fallback = false;
};

struct OptTrace {
  std::vector<IterRecord> records;  // record 0 is x0
  std::vector<RVec> iterates;       // filled when record_iterates
  RVec x;
  OptStatus status = OptStatus::MaxIterations;
};

OptTrace newton_cg(const FiniteSumProblem& problem, const OptConfig& config);
OptTrace newton_mr(const FiniteSumProblem& problem, const OptConfig& config);
OptTrace trust_region(const FiniteSumProblem& problem, const OptConfig& config);

/// The Hessian model used at one outer iterate. Charges score computations to
/// the meter. Exposed for tests and the bench harness.
struct HessianModel {
  HessianOperator op;
  bool uniform_fallback = false;
};
HessianModel build_hessian_model(const FiniteSumProblem& problem, const RVec& dvals,
                                 const OptConfig& config, std::uint64_t seed, OracleMeter* meter);

}  // namespace nonpsd
