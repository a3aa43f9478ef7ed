#pragma once

// Inner solvers driven by Hessian-vector products only.

#include <functional>

#include "nonpsd/core_complex.hpp"

namespace nonpsd {

using LinearOperator = std::function<RVec(const RVec&)>;

struct KrylovOptions {
  Index max_iterations = 100;
  double rel_tol = 1e-8;
};

struct CgResult {
  RVec step;
  Index iterations = 0;
  bool converged = false;
  bool negative_curvature = false;
};

/// CG on H p = -g. On p^T H p <= 0 returns the current iterate, or -g if that
/// happens on the first iteration.
CgResult cg_solve(const LinearOperator& hessp, const RVec& g, const KrylovOptions& opts = {});

struct MinnormResult {
  RVec step;
  RVec hg;  // H g, the Krylov seed vector
  Index iterations = 0;
  bool converged = false;
};

/// Minimum-norm minimizer of ||H p + g|| (p = -H^+ g at convergence) by
/// Lanczos on K(H, H g) with full reorthogonalization. Stops when
/// ||H (H p + g)|| <= rel_tol ||H g|| or the Krylov space becomes invariant.
MinnormResult minnorm_lsq(const LinearOperator& hessp, const RVec& g, const KrylovOptions& opts = {});

enum class SteihaugExit { ZeroGradient, Interior, NegativeCurvature, Boundary, MaxIterations };

struct SteihaugResult {
  RVec step;
  double model_value = 0.0;  // g^T p + p^T H p / 2
  Index iterations = 0;
  SteihaugExit exit = SteihaugExit::ZeroGradient;
};

SteihaugResult cg_steihaug(const LinearOperator& hessp, const RVec& g, double radius,
                           const KrylovOptions& opts = {});

}  // namespace nonpsd
