#include "nonpsd/hybrid_sampling.hpp"

#include <algorithm>
#include <numeric>

namespace nonpsd {

namespace {

template <typename Mat>
Mat gather_rows(const Mat& b, const std::vector<Index>& rows) {
  Mat out(static_cast<Index>(rows.size()), b.cols());
  for (std::size_t j = 0; j < rows.size(); ++j) out.row(static_cast<Index>(j)) = b.row(rows[j]);
  return out;
}

template <typename Mat>
HybridPlan ls_det_impl(const Mat& b, const HybridParams& params, std::uint64_t seed) {
  if (params.rounds < 1) throw Error(ErrorCode::InvalidInput, "ls_det_sample: rounds must be >= 1");
  if (!(params.threshold > 0.0)) throw Error(ErrorCode::InvalidInput, "ls_det_sample: threshold must be > 0");
  if (params.sample_count < 0) throw Error(ErrorCode::InvalidInput, "ls_det_sample: sample count must be >= 0");
  require_finite(b, "ls_det_sample");

  const Index n = b.rows();
  const Index cap = params.round_cap > 0 ? params.round_cap : 2 * b.cols();

  HybridPlan plan;
  plan.rounds = params.rounds;
  plan.threshold = params.threshold;
  plan.mode = params.mode;
  plan.sampled.source_rows = n;

  std::vector<Index> remainder(static_cast<std::size_t>(n));
  std::iota(remainder.begin(), remainder.end(), Index{0});
  RVec scores;
  bool scores_current = false;

  for (Index round = 0; round < params.rounds && !remainder.empty(); ++round) {
    scores = exact_leverage_scores(gather_rows(b, remainder)).values;
    scores_current = true;
    std::vector<Index> heavy;  // positions into remainder
    for (Index j = 0; j < scores.size(); ++j) {
      if (scores(j) >= params.threshold) heavy.push_back(j);
    }
    if (heavy.empty()) break;
    std::stable_sort(heavy.begin(), heavy.end(),
                     [&](Index x, Index y) { return scores(x) > scores(y); });
    const bool capped = static_cast<Index>(heavy.size()) > cap;
    if (capped) heavy.resize(static_cast<std::size_t>(cap));

    std::vector<char> take(remainder.size(), 0);
    for (Index j : heavy) {
      take[static_cast<std::size_t>(j)] = 1;
      plan.deterministic_rows.push_back(remainder[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> next;
    next.reserve(remainder.size() - heavy.size());
    for (std::size_t j = 0; j < remainder.size(); ++j) {
      if (!take[j]) next.push_back(remainder[j]);
    }
    remainder.swap(next);
    scores_current = false;
    if (capped && round + 1 == params.rounds) plan.saturated = true;
  }
  if (remainder.empty()) plan.saturated = true;
  if (remainder.empty() || params.sample_count == 0) return plan;

  RVec local;
  if (params.mode == RemainderMode::Leverage) {
    local = scores_current ? scores : exact_leverage_scores(gather_rows(b, remainder)).values;
  }
  if (params.mode == RemainderMode::Uniform || !(local.sum() > 0.0)) {
    local = RVec::Ones(static_cast<Index>(remainder.size()));
  }
  local /= local.sum();

  ScoreVector probs{RVec::Zero(n)};
  for (std::size_t j = 0; j < remainder.size(); ++j) probs.values(remainder[j]) = local(static_cast<Index>(j));
  plan.sampled = build_sampling_sketch(probs, params.sample_count, seed);
  return plan;
}

template <typename Mat>
Mat hybrid_gram_impl(const HybridPlan& plan, const Mat& b) {
  if (plan.sampled.source_rows != b.rows()) {
    throw Error(ErrorCode::InvalidInput, "hybrid_gram: plan built for a different row count");
  }
  Mat gram = Mat::Zero(b.cols(), b.cols());
  for (Index i : plan.deterministic_rows) {
    gram.noalias() += b.row(i).transpose() * b.row(i);
  }
  if (plan.sampled.size() > 0) {
    const Mat c = apply_sketch(plan.sampled, b);
    gram.noalias() += c.transpose() * c;
  }
  return gram;
}

}  // namespace

HybridPlan ls_det_sample(const CMat& b, const HybridParams& params, std::uint64_t seed) {
  return ls_det_impl(b, params, seed);
}

HybridPlan ls_det_sample(const RMat& b, const HybridParams& params, std::uint64_t seed) {
  return ls_det_impl(b, params, seed);
}

CMat hybrid_gram(const HybridPlan& plan, const CMat& b) { return hybrid_gram_impl(plan, b); }
RMat hybrid_gram(const HybridPlan& plan, const RMat& b) { return hybrid_gram_impl(plan, b); }

}  // namespace nonpsd
