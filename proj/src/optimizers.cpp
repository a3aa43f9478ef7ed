#include "nonpsd/optimizers.hpp"

#include <cmath>
#include <limits>

#include "nonpsd/rng.hpp"

namespace nonpsd {

std::string_view status_name(OptStatus status) noexcept {
  switch (status) {
    case OptStatus::Converged: return "converged";
    case OptStatus::MaxIterations: return "max_iterations";
    case OptStatus::BudgetExhausted: return "budget_exhausted";
    case OptStatus::LineSearchFailed: return "line_search_failed";
    case OptStatus::RadiusUnderflow: return "radius_underflow";
  }
  return "?";
}

void OptConfig::validate(Index n) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Config, msg); };
  if (scheme != Scheme::Full && (sample_size < 1)) fail("sample_size must be >= 1 for sampled schemes");
  if (scheme != Scheme::Full && sample_size > 100 * std::max<Index>(n, 1)) fail("sample_size is unreasonably large");
  if (!(det_fraction >= 0.0 && det_fraction <= 1.0)) fail("det_fraction must lie in [0, 1]");
  if (max_outer < 0) fail("max_outer must be >= 0");
  if (!(max_oracle_calls > 0.0)) fail("max_oracle_calls must be > 0");
  if (inner.max_iterations < 1) fail("inner cap must be >= 1");
  if (!(inner.rel_tol > 0.0)) fail("inner tolerance must be > 0");
  if (!(line_search_rho > 0.0 && line_search_rho < 1.0)) fail("line_search_rho must lie in (0, 1)");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (!(tr_delta0 > 0.0)) fail("tr_delta0 must be > 0");
  if (!(tr_eta > 0.0 && tr_eta < 1.0)) fail("tr_eta must lie in (0, 1)");
  if (!(tr_gamma > 1.0)) fail("tr_gamma must be > 1");
  if (!(grad_tol >= 0.0)) fail("grad_tol must be >= 0");
}

HessianModel build_hessian_model(const FiniteSumProblem& problem, const RVec& dvals,
                                 const OptConfig& config, std::uint64_t seed, OracleMeter* meter) {
  HessianModel model;
  auto charge = [&](std::int64_t units) {
    if (meter != nullptr) meter->charge_units(units);
  };
  switch (config.scheme) {
    case Scheme::Full:
      model.op = HessianOperator::full(problem, dvals);
      return model;
    case Scheme::LSDet: {
      const Index t = config.sample_size;
      const auto det = static_cast<Index>(std::llround(config.det_fraction * static_cast<double>(t)));
      const Index h = t - det;
      if (det == 0) break;  // plain LS sampling
      HybridParams params;
      params.rounds = 1;
      params.threshold = std::numeric_limits<double>::min();
      params.round_cap = det;
      params.sample_count = h;
      params.mode = RemainderMode::Leverage;
      const HybridPlan plan = ls_det_sample(abs_sqrt_scaled(problem.a, dvals), params, seed);
      charge(kLeverageUnits);
      if (h > 0) charge(kLeverageUnits);
      model.op = HessianOperator::sketched(problem, dvals, plan);
      return model;
    }
    default:
      break;
  }
  const Scheme scheme = config.scheme == Scheme::LSDet ? Scheme::LS : config.scheme;
  const SchemeProbabilities sp = scheme_probabilities(problem.a, dvals, scheme, meter);
  model.uniform_fallback = sp.uniform_fallback;
  model.op = HessianOperator::sketched(problem, dvals, build_sampling_sketch(sp.probs, config.sample_size, seed));
  return model;
}

namespace {

struct RunState {
  const FiniteSumProblem& problem;
  const OptConfig& config;
  OracleMeter meter;
  OptTrace trace;
  RVec x;
  Evaluation ev;

  RunState(const FiniteSumProblem& p, const OptConfig& c) : problem(p), config(c), meter(p.rows()) {
    problem.validate();
    config.validate(problem.rows());
    x = RVec::Zero(problem.dim());
    ev = evaluate(problem, x, &meter);
    IterRecord first;
    first.oracle_calls = meter.function_evals();
    first.objective = ev.value;
    first.grad_norm = ev.grad.norm();
    first.step_or_radius = 0.0;
    if (problem.dim() == 0) first.grad_norm = 0.0;
    trace.records.push_back(first);
    if (config.record_iterates) trace.iterates.push_back(x);
  }

  bool converged() const { return ev.grad.norm() <= config.grad_tol; }
  bool over_budget() const { return meter.function_evals() >= config.max_oracle_calls; }

  void push(Index iter, double step, bool accepted, bool fallback, bool degenerate = false) {
    IterRecord rec;
    rec.iter = iter;
    rec.oracle_calls = meter.function_evals();
    rec.objective = ev.value;
    rec.grad_norm = ev.grad.norm();
    rec.step_or_radius = step;
    rec.accepted = accepted;
    rec.uniform_fallback = fallback;
    rec.degenerate = degenerate;
    trace.records.push_back(rec);
    if (config.record_iterates && accepted) trace.iterates.push_back(x);
  }

  HessianModel model_at_x(Index iter) {
    const RVec dvals = d_diag_from_margins(problem, ev.margins);
    return build_hessian_model(problem, dvals, config, derive_seed(config.seed, static_cast<std::uint64_t>(iter)),
                               &meter);
  }

  // Returns true when the loop should stop before doing iteration work.
  bool pre_iteration(OptStatus& status) {
    if (converged()) {
      status = OptStatus::Converged;
      return true;
    }
    if (over_budget()) {
      status = OptStatus::BudgetExhausted;
      return true;
    }
    return false;
  }

  OptTrace finish(OptStatus status, bool stopped) {
    if (!stopped) status = converged() ? OptStatus::Converged : OptStatus::MaxIterations;
    trace.status = status;
    trace.x = x;
    return std::move(trace);
  }
};

}  // namespace

OptTrace newton_cg(const FiniteSumProblem& problem, const OptConfig& config) {
  RunState st(problem, config);
  OptStatus status = OptStatus::MaxIterations;
  bool stopped = false;
  for (Index k = 1; k <= config.max_outer && !stopped; ++k) {
    if (st.pre_iteration(status)) {
      stopped = true;
      break;
    }
    const HessianModel model = st.model_at_x(k);
    const CgResult cg = cg_solve([&](const RVec& v) { return model.op.apply(v, &st.meter); }, st.ev.grad,
                                 config.inner);
    const RVec& p = cg.step;
    const double slope = p.dot(st.ev.grad);
    double alpha = 1.0;
    bool accepted = false;
    RVec trial;
    for (Index h = 0; h <= config.max_halvings; ++h) {
      trial = st.x + alpha * p;
      const double f_trial = value(problem, trial, &st.meter);
      if (f_trial <= st.ev.value + config.line_search_rho * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      st.push(k, 0.0, false, model.uniform_fallback);
      status = OptStatus::LineSearchFailed;
      stopped = true;
      break;
    }
    st.x = trial;
    st.ev = evaluate(problem, st.x, nullptr);
    st.meter.charge_units(OracleMeter::kGradUnits);
    st.push(k, alpha, true, model.uniform_fallback);
  }
  return st.finish(status, stopped);
}

OptTrace newton_mr(const FiniteSumProblem& problem, const OptConfig& config) {
  RunState st(problem, config);
  OptStatus status = OptStatus::MaxIterations;
  bool stopped = false;
  for (Index k = 1; k <= config.max_outer && !stopped; ++k) {
    if (st.pre_iteration(status)) {
      stopped = true;
      break;
    }
    const HessianModel model = st.model_at_x(k);
    const MinnormResult mr = minnorm_lsq([&](const RVec& v) { return model.op.apply(v, &st.meter); },
                                         st.ev.grad, config.inner);
    const RVec& p = mr.step;
    const double slope = p.dot(mr.hg);
    const double gg = st.ev.grad.squaredNorm();
    double alpha = 1.0;
    bool accepted = false;
    Evaluation trial_ev;
    RVec trial;
    if (p.squaredNorm() > 0.0) {
      for (Index h = 0; h <= config.max_halvings; ++h) {
        trial = st.x + alpha * p;
        trial_ev = evaluate(problem, trial, &st.meter);
        if (trial_ev.grad.squaredNorm() <= gg + 2.0 * config.line_search_rho * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
    }
    if (!accepted) {
      st.push(k, 0.0, false, model.uniform_fallback);
      status = OptStatus::LineSearchFailed;
      stopped = true;
      break;
    }
    st.x = trial;
    st.ev = std::move(trial_ev);
    st.push(k, alpha, true, model.uniform_fallback);
  }
  return st.finish(status, stopped);
}

OptTrace trust_region(const FiniteSumProblem& problem, const OptConfig& config) {
  RunState st(problem, config);
  OptStatus status = OptStatus::MaxIterations;
  bool stopped = false;
  double radius = config.tr_delta0;
  HessianModel model;
  bool refresh = true;
  for (Index k = 1; k <= config.max_outer && !stopped; ++k) {
    if (st.pre_iteration(status)) {
      stopped = true;
      break;
    }
    if (refresh) {
      model = st.model_at_x(k);
      refresh = false;
    }
    const SteihaugResult sub = cg_steihaug([&](const RVec& v) { return model.op.apply(v, &st.meter); },
                                           st.ev.grad, radius, config.inner);
    const RVec& p = sub.step;
    const double m = sub.model_value;
    bool degenerate = false;
    bool accept = false;
    double f_trial = st.ev.value;
    if (p.squaredNorm() == 0.0 && m == 0.0) {
      degenerate = true;
      accept = true;
    } else if (m < 0.0) {
      f_trial = value(problem, st.x + p, &st.meter);
      const double rho = (f_trial - st.ev.value) / m;
      accept = rho >= config.tr_eta;
    }
    if (accept) {
      radius *= config.tr_gamma;
      if (!degenerate) {
        st.x += p;
        st.ev = evaluate(problem, st.x, nullptr);
        st.meter.charge_units(OracleMeter::kGradUnits);
        refresh = true;
      }
    } else {
      radius /= config.tr_gamma;
    }
    st.push(k, radius, accept, model.uniform_fallback, degenerate);
    if (radius < 1e-16) {
      status = OptStatus::RadiusUnderflow;
      stopped = true;
    }
  }
  return st.finish(status, stopped);
}

}  // namespace nonpsd
