#include "nonpsd/schemes.hpp"

#include <cmath>

namespace nonpsd {

std::string_view scheme_name(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::Full: return "Full";
    case Scheme::Uniform: return "Uniform";
    case Scheme::LS: return "LS";
    case Scheme::RN: return "RN";
    case Scheme::LSMX: return "LS-MX";
    case Scheme::RNMX: return "RN-MX";
    case Scheme::LSDet: return "LS-Det";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Full, Scheme::Uniform, Scheme::LS, Scheme::RN, Scheme::LSMX, Scheme::RNMX,
                   Scheme::LSDet}) {
    if (scheme_name(s) == name) return s;
  }
  throw Error(ErrorCode::Config, "unknown scheme '" + std::string(name) + "'");
}

RMat abs_sqrt_scaled(const RMat& a, const RVec& dvals) {
  if (dvals.size() != a.rows()) throw Error(ErrorCode::InvalidInput, "D length != rows of A");
  return dvals.cwiseAbs().cwiseSqrt().asDiagonal() * a;
}

SchemeProbabilities scheme_probabilities(const RMat& a, const RVec& dvals, Scheme scheme,
                                         OracleMeter* meter) {
  const Index n = a.rows();
  if (dvals.size() != n) throw Error(ErrorCode::InvalidInput, "scheme_probabilities: D length != n");
  if (n == 0) throw Error(ErrorCode::InvalidInput, "scheme_probabilities: empty problem");
  auto charge = [&](std::int64_t units) {
    if (meter != nullptr) meter->charge_units(units);
  };

  RVec scores;
  switch (scheme) {
    case Scheme::Uniform:
      scores = RVec::Ones(n);
      break;
    case Scheme::LS:
      scores = exact_leverage_scores(abs_sqrt_scaled(a, dvals)).values;
      charge(kLeverageUnits);
      break;
    case Scheme::RN:
      scores = dvals.cwiseAbs().cwiseProduct(a.rowwise().squaredNorm());
      break;
    case Scheme::LSMX: {
      const RMat da = dvals.asDiagonal() * a;
      scores = exact_leverage_scores(a).values + exact_leverage_scores(da).values;
      charge(2 * kLeverageUnits);
      break;
    }
    case Scheme::RNMX: {
      const RVec norms = a.rowwise().norm();
      scores = norms + dvals.cwiseAbs().cwiseProduct(norms);
      break;
    }
    case Scheme::Full:
    case Scheme::LSDet:
      throw Error(ErrorCode::InvalidInput,
                  "scheme_probabilities: " + std::string(scheme_name(scheme)) + " has no probability vector");
  }

  SchemeProbabilities out;
  const double total = scores.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    out.probs.values = RVec::Constant(n, 1.0 / static_cast<double>(n));
    out.uniform_fallback = true;
  } else {
    out.probs.values = scores / total;
  }
  return out;
}

SchemeProbabilities scheme_probabilities(const FiniteSumProblem& problem, const RVec& x, Scheme scheme,
                                         OracleMeter* meter) {
  const RVec dvals = d_diag(problem, x, meter);
  return scheme_probabilities(problem.a, dvals, scheme, meter);
}

}  // namespace nonpsd
