#pragma once

// Finite-sum objective F(x) = (1/n) sum_i f_i(a_i^T x) + (lambda/2)||x||^2, its
// derivatives, exact and sketched Hessian-vector products, and the oracle-call
// meter.

#include <cstdint>
#include <functional>
#include <string>

#include "nonpsd/hybrid_sampling.hpp"
#include "nonpsd/sketch_sampling.hpp"

namespace nonpsd {

enum class LossKind { NllsClassification, TukeyBiweight, Quadratic, Custom };

/// f(t; b), f'(t; b), f''(t; b) for one row with label b.
struct LossFamily {
  using Fn = std::function<double(double, double)>;

  LossKind kind = LossKind::Quadratic;
  Fn custom_f, custom_df, custom_d2f;

  /// (1/(1+exp(-t)) - b)^2, sigmoid argument clamped to [-36, 36].
  static LossFamily nlls();
  /// r^2/(1+r^2) with r = t - b.
  static LossFamily tukey();
  /// (t - b)^2 / 2.
  static LossFamily quadratic();
  static LossFamily custom(Fn f, Fn df, Fn d2f);

  double f(double t, double b) const;
  double df(double t, double b) const;
  double d2f(double t, double b) const;
  std::string name() const;
};

/// Parses "nlls", "tukey" or "quadratic". Throws Config otherwise.
LossFamily parse_loss(const std::string& name);

/// sup_t |f''(t)|: closed form for tukey (2) and quadratic (1), 1-D grid plus
/// golden-section refinement for nlls. Throws InvalidInput for Custom.
double curvature_bound(const LossFamily& loss);

struct FiniteSumProblem {
  RMat a;        // n x d
  RVec labels;   // n
  LossFamily loss;
  double ridge_lambda = 0.0;

  Index rows() const { return a.rows(); }
  Index dim() const { return a.cols(); }
  /// Throws InvalidInput on shape mismatch, negative lambda or non-finite data.
  void validate() const;
};

/// Counts work in row evaluations; one function evaluation is n of them.
class OracleMeter {
 public:
  static constexpr std::int64_t kValueUnits = 1;
  static constexpr std::int64_t kGradUnits = 1;
  static constexpr std::int64_t kHesspUnits = 2;
  static constexpr std::int64_t kDiagUnits = 1;
  static constexpr std::int64_t kScoreProductUnits = 1;  // one product with D^{1/2}A

  OracleMeter() = default;
  explicit OracleMeter(Index rows) : rows_(rows) {}

  void charge_units(std::int64_t units) { row_evals_ += units * rows_; }
  void charge_rows(std::int64_t rows) { row_evals_ += rows; }

  Index rows() const { return rows_; }
  std::int64_t row_evaluations() const { return row_evals_; }
  double function_evals() const {
    return rows_ > 0 ? static_cast<double>(row_evals_) / static_cast<double>(rows_) : 0.0;
  }

 private:
  Index rows_ = 0;
  std::int64_t row_evals_ = 0;
};

double value(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter = nullptr);
RVec grad(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter = nullptr);
/// f_i''(a_i^T x); sign-indefinite.
RVec d_diag(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter = nullptr);

/// One data pass producing F, grad F and the margins A x (charged value + grad).
struct Evaluation {
  double value = 0.0;
  RVec grad;
  RVec margins;
};
Evaluation evaluate(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter = nullptr);
RVec d_diag_from_margins(const FiniteSumProblem& problem, const RVec& margins);

/// v -> (1/n) sum_j c_j (r_j^T v) r_j + lambda v over a set of rows r_j of A.
/// Each apply charges 2 units scaled by the row count over n.
class HessianOperator {
 public:
  HessianOperator() = default;
  /// Full Hessian at the point whose f'' values are dvals; borrows problem.a.
  static HessianOperator full(const FiniteSumProblem& problem, const RVec& dvals);
  /// Sampled rows with coefficients w^2 D plus exact deterministic rows.
  static HessianOperator sketched(const FiniteSumProblem& problem, const RVec& dvals,
                                  const SamplingSketch& sketch,
                                  const std::vector<Index>& deterministic_rows = {});
  static HessianOperator sketched(const FiniteSumProblem& problem, const RVec& dvals,
                                  const HybridPlan& plan);

  RVec apply(const RVec& v, OracleMeter* meter = nullptr) const;
  RMat dense() const;
  Index support_rows() const { return coef_.size(); }
  Index dim() const { return rows().cols(); }

 private:
  const RMat& rows() const { return shared_ != nullptr ? *shared_ : owned_; }

  const RMat* shared_ = nullptr;
  RMat owned_;
  RVec coef_;
  double lambda_ = 0.0;
  double inv_n_ = 0.0;
  bool full_ = false;
};

RVec hessp_full(const FiniteSumProblem& problem, const RVec& x, const RVec& v,
                OracleMeter* meter = nullptr);
RVec hessp_sketched(const FiniteSumProblem& problem, const RVec& x, const RVec& v,
                    const SamplingSketch& sketch, OracleMeter* meter = nullptr);
RVec hessp_sketched(const FiniteSumProblem& problem, const RVec& x, const RVec& v,
                    const HybridPlan& plan, OracleMeter* meter = nullptr);

/// A^T D(x) A / n + lambda I, materialized. Test and audit use only.
RMat hessian_dense(const FiniteSumProblem& problem, const RVec& x);

/// 4 ||A||_2^2 h.
double convex_ridge_lambda(const FiniteSumProblem& problem, double h);
double convex_ridge_lambda(const FiniteSumProblem& problem);

}  // namespace nonpsd
