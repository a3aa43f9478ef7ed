#include "nonpsd/hessian_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace nonpsd {

namespace {

constexpr double kSigmoidClamp = 36.0;

double sigmoid(double t) {
  const double c = std::clamp(t, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-c));
}

double nlls_f(double t, double b) {
  const double s = sigmoid(t);
  return (s - b) * (s - b);
}

double nlls_df(double t, double b) {
  const double s = sigmoid(t);
  return 2.0 * (s - b) * s * (1.0 - s);
}

double nlls_d2f(double t, double b) {
  const double s = sigmoid(t);
  const double ds = s * (1.0 - s);
  const double d2s = ds * (1.0 - 2.0 * s);
  return 2.0 * (ds * ds + (s - b) * d2s);
}

double tukey_f(double t, double b) {
  const double r2 = (t - b) * (t - b);
  return r2 / (1.0 + r2);
}

double tukey_df(double t, double b) {
  const double r = t - b;
  const double q = 1.0 + r * r;
  return 2.0 * r / (q * q);
}

double tukey_d2f(double t, double b) {
  const double r2 = (t - b) * (t - b);
  const double q = 1.0 + r2;
  return 2.0 * (1.0 - 3.0 * r2) / (q * q * q);
}

double nlls_curvature_sup() {
  double best = 0.0;
  for (double label : {0.0, 1.0}) {
    auto g = [label](double t) { return std::abs(nlls_d2f(t, label)); };
    const double step = 1e-3;
    double arg = 0.0;
    double local = -1.0;
    for (double t = -kSigmoidClamp; t <= kSigmoidClamp; t += step) {
      const double v = g(t);
      if (v > local) {
        local = v;
        arg = t;
      }
    }
    double lo = arg - step;
    double hi = arg + step;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
      const double m1 = hi - ratio * (hi - lo);
      const double m2 = lo + ratio * (hi - lo);
      if (g(m1) < g(m2)) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    best = std::max({best, local, g(0.5 * (lo + hi))});
  }
  return best;
}

void require_dim(const FiniteSumProblem& problem, const RVec& x, const char* what) {
  if (x.size() != problem.dim()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + ": vector length does not match d");
  }
  if (!x.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite input");
}

}  // namespace

LossFamily LossFamily::nlls() { return LossFamily{LossKind::NllsClassification, {}, {}, {}}; }
LossFamily LossFamily::tukey() { return LossFamily{LossKind::TukeyBiweight, {}, {}, {}}; }
LossFamily LossFamily::quadratic() { return LossFamily{LossKind::Quadratic, {}, {}, {}}; }

LossFamily LossFamily::custom(Fn f, Fn df, Fn d2f) {
  if (!f || !df || !d2f) throw Error(ErrorCode::InvalidInput, "custom loss needs f, f' and f''");
  return LossFamily{LossKind::Custom, std::move(f), std::move(df), std::move(d2f)};
}

double LossFamily::f(double t, double b) const {
  switch (kind) {
    case LossKind::NllsClassification: return nlls_f(t, b);
    case LossKind::TukeyBiweight: return tukey_f(t, b);
    case LossKind::Quadratic: return 0.5 * (t - b) * (t - b);
    case LossKind::Custom: return custom_f(t, b);
  }
  return 0.0;
}

double LossFamily::df(double t, double b) const {
  switch (kind) {
    case LossKind::NllsClassification: return nlls_df(t, b);
    case LossKind::TukeyBiweight: return tukey_df(t, b);
    case LossKind::Quadratic: return t - b;
    case LossKind::Custom: return custom_df(t, b);
  }
  return 0.0;
}

double LossFamily::d2f(double t, double b) const {
  switch (kind) {
    case LossKind::NllsClassification: return nlls_d2f(t, b);
    case LossKind::TukeyBiweight: return tukey_d2f(t, b);
    case LossKind::Quadratic: return 1.0;
    case LossKind::Custom: return custom_d2f(t, b);
  }
  return 0.0;
}

std::string LossFamily::name() const {
  switch (kind) {
    case LossKind::NllsClassification: return "nlls";
    case LossKind::TukeyBiweight: return "tukey";
    case LossKind::Quadratic: return "quadratic";
    case LossKind::Custom: return "custom";
  }
  return "custom";
}

LossFamily parse_loss(const std::string& name) {
  if (name == "nlls") return LossFamily::nlls();
  if (name == "tukey") return LossFamily::tukey();
  if (name == "quadratic") return LossFamily::quadratic();
  throw Error(ErrorCode::Config, "unknown loss family '" + name + "'");
}

double curvature_bound(const LossFamily& loss) {
  switch (loss.kind) {
    case LossKind::NllsClassification: {
      static const double bound = nlls_curvature_sup();
      return bound;
    }
    case LossKind::TukeyBiweight: return 2.0;
    case LossKind::Quadratic: return 1.0;
    case LossKind::Custom: break;
  }
  throw Error(ErrorCode::InvalidInput, "curvature_bound: no closed form for a custom loss; supply h");
}

void FiniteSumProblem::validate() const {
  if (labels.size() != a.rows()) throw Error(ErrorCode::InvalidInput, "problem: labels length != rows of A");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw Error(ErrorCode::InvalidInput, "problem: ridge_lambda must be finite and >= 0");
  }
  require_finite(a, "problem");
  if (!labels.allFinite()) throw Error(ErrorCode::InvalidInput, "problem: non-finite label");
}

Evaluation evaluate(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter) {
  require_dim(problem, x, "evaluate");
  const Index n = problem.rows();
  Evaluation out;
  out.margins = problem.a * x;
  RVec slopes(n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc += problem.loss.f(out.margins(i), problem.labels(i));
    slopes(i) = problem.loss.df(out.margins(i), problem.labels(i));
  }
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  out.value = acc * inv_n + 0.5 * problem.ridge_lambda * x.squaredNorm();
  out.grad = problem.a.transpose() * slopes * inv_n + problem.ridge_lambda * x;
  if (meter != nullptr) meter->charge_units(OracleMeter::kValueUnits + OracleMeter::kGradUnits);
  return out;
}

double value(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter) {
  require_dim(problem, x, "value");
  const Index n = problem.rows();
  const RVec margins = problem.a * x;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += problem.loss.f(margins(i), problem.labels(i));
  if (meter != nullptr) meter->charge_units(OracleMeter::kValueUnits);
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  return acc * inv_n + 0.5 * problem.ridge_lambda * x.squaredNorm();
}

RVec grad(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter) {
  require_dim(problem, x, "grad");
  const Index n = problem.rows();
  const RVec margins = problem.a * x;
  RVec slopes(n);
  for (Index i = 0; i < n; ++i) slopes(i) = problem.loss.df(margins(i), problem.labels(i));
  if (meter != nullptr) meter->charge_units(OracleMeter::kGradUnits);
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  return problem.a.transpose() * slopes * inv_n + problem.ridge_lambda * x;
}

RVec d_diag_from_margins(const FiniteSumProblem& problem, const RVec& margins) {
  RVec out(margins.size());
  for (Index i = 0; i < margins.size(); ++i) out(i) = problem.loss.d2f(margins(i), problem.labels(i));
  return out;
}

RVec d_diag(const FiniteSumProblem& problem, const RVec& x, OracleMeter* meter) {
  require_dim(problem, x, "d_diag");
  if (meter != nullptr) meter->charge_units(OracleMeter::kDiagUnits);
  return d_diag_from_margins(problem, problem.a * x);
}

HessianOperator HessianOperator::full(const FiniteSumProblem& problem, const RVec& dvals) {
  if (dvals.size() != problem.rows()) throw Error(ErrorCode::InvalidInput, "hessian: D length != n");
  HessianOperator op;
  op.shared_ = &problem.a;
  op.coef_ = dvals;
  op.lambda_ = problem.ridge_lambda;
  op.inv_n_ = problem.rows() > 0 ? 1.0 / static_cast<double>(problem.rows()) : 0.0;
  op.full_ = true;
  return op;
}

HessianOperator HessianOperator::sketched(const FiniteSumProblem& problem, const RVec& dvals,
                                          const SamplingSketch& sketch,
                                          const std::vector<Index>& deterministic_rows) {
  const Index n = problem.rows();
  if (dvals.size() != n) throw Error(ErrorCode::InvalidInput, "hessian: D length != n");
  if (sketch.source_rows != n) throw Error(ErrorCode::InvalidInput, "hessian: sketch built over a different n");
  const Index m = sketch.size() + static_cast<Index>(deterministic_rows.size());
  HessianOperator op;
  op.owned_.resize(m, problem.dim());
  op.coef_.resize(m);
  Index j = 0;
  for (Index i : deterministic_rows) {
    if (i < 0 || i >= n) throw Error(ErrorCode::InvalidInput, "hessian: row index out of range");
    op.owned_.row(j) = problem.a.row(i);
    op.coef_(j) = dvals(i);
    ++j;
  }
  for (const Pick& pick : sketch.picks) {
    if (pick.row < 0 || pick.row >= n) throw Error(ErrorCode::InvalidInput, "hessian: row index out of range");
    op.owned_.row(j) = problem.a.row(pick.row);
    op.coef_(j) = pick.weight * pick.weight * dvals(pick.row);
    ++j;
  }
  op.lambda_ = problem.ridge_lambda;
  op.inv_n_ = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  return op;
}

HessianOperator HessianOperator::sketched(const FiniteSumProblem& problem, const RVec& dvals,
                                          const HybridPlan& plan) {
  return sketched(problem, dvals, plan.sampled, plan.deterministic_rows);
}

RVec HessianOperator::apply(const RVec& v, OracleMeter* meter) const {
  const RMat& r = rows();
  if (v.size() != r.cols()) throw Error(ErrorCode::InvalidInput, "hessp: vector length does not match d");
  RVec out = lambda_ * v;
  if (coef_.size() > 0) {
    const RVec inner = coef_.cwiseProduct(r * v);
    out.noalias() += inv_n_ * (r.transpose() * inner);
  }
  if (meter != nullptr) {
    if (full_) {
      meter->charge_units(OracleMeter::kHesspUnits);
    } else {
      meter->charge_rows(OracleMeter::kHesspUnits * coef_.size());
    }
  }
  return out;
}

RMat HessianOperator::dense() const {
  const RMat& r = rows();
  RMat out = lambda_ * RMat::Identity(r.cols(), r.cols());
  if (coef_.size() > 0) out.noalias() += inv_n_ * (r.transpose() * coef_.asDiagonal() * r);
  return out;
}

RVec hessp_full(const FiniteSumProblem& problem, const RVec& x, const RVec& v, OracleMeter* meter) {
  require_dim(problem, x, "hessp_full");
  const RVec dvals = d_diag_from_margins(problem, problem.a * x);
  return HessianOperator::full(problem, dvals).apply(v, meter);
}

RVec hessp_sketched(const FiniteSumProblem& problem, const RVec& x, const RVec& v,
                    const SamplingSketch& sketch, OracleMeter* meter) {
  require_dim(problem, x, "hessp_sketched");
  const RVec dvals = d_diag_from_margins(problem, problem.a * x);
  return HessianOperator::sketched(problem, dvals, sketch).apply(v, meter);
}

RVec hessp_sketched(const FiniteSumProblem& problem, const RVec& x, const RVec& v,
                    const HybridPlan& plan, OracleMeter* meter) {
  require_dim(problem, x, "hessp_sketched");
  const RVec dvals = d_diag_from_margins(problem, problem.a * x);
  return HessianOperator::sketched(problem, dvals, plan).apply(v, meter);
}

RMat hessian_dense(const FiniteSumProblem& problem, const RVec& x) {
  require_dim(problem, x, "hessian_dense");
  const RVec dvals = d_diag_from_margins(problem, problem.a * x);
  return HessianOperator::full(problem, dvals).dense();
}

double convex_ridge_lambda(const FiniteSumProblem& problem, double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidInput, "convex_ridge_lambda: h must be finite and >= 0");
  const double norm = spectral_norm(problem.a);
  return 4.0 * norm * norm * h;
}

double convex_ridge_lambda(const FiniteSumProblem& problem) {
  return convex_ridge_lambda(problem, curvature_bound(problem.loss));
}

}  // namespace nonpsd
