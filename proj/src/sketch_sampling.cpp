#include "nonpsd/sketch_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nonpsd/rng.hpp"

namespace nonpsd {

ScoreVector ScoreVector::normalized() const {
  const double sum = total();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorCode::InvalidInput, "scores have no positive mass");
  }
  return ScoreVector{values / sum};
}

namespace {

template <typename Mat>
ScoreVector exact_scores_impl(const Mat& b) {
  require_finite(b, "exact_leverage_scores");
  ScoreVector out{RVec::Zero(b.rows())};
  if (b.size() == 0) return out;
  Eigen::BDCSVD<Mat> dec(b, Eigen::ComputeThinU);
  const Index rank = numerical_rank(dec.singularValues(), b.rows(), b.cols());
  if (rank == 0) return out;
  out.values = dec.matrixU().leftCols(rank).rowwise().squaredNorm();
  return out;
}

// Returns S*B for a dense Gaussian S (s x n, entries N(0, 1/s)) generated one
// column at a time so the s x n matrix is never held.
template <typename Mat>
Mat streamed_gaussian_embedding(const Mat& b, Index s, Rng& rng) {
  Mat sb = Mat::Zero(s, b.cols());
  RVec g(s);
  const double scale = 1.0 / std::sqrt(static_cast<double>(s));
  for (Index i = 0; i < b.rows(); ++i) {
    for (Index k = 0; k < s; ++k) g(k) = rng.normal() * scale;
    sb.noalias() += g * b.row(i);
  }
  return sb;
}

template <typename Mat>
ScoreVector approx_scores_impl(const Mat& b, std::uint64_t seed, const ApproxLeverageOptions& opts) {
  require_finite(b, "approx_leverage_scores");
  const Index n = b.rows();
  const Index d = b.cols();
  if (n == 0 || d == 0) return ScoreVector{RVec::Zero(n)};
  Index s = opts.embed_rows > 0
                ? opts.embed_rows
                : static_cast<Index>(std::ceil(opts.embed_factor * static_cast<double>(d)));
  Index r = opts.jl_cols > 0
                ? opts.jl_cols
                : static_cast<Index>(std::ceil(opts.jl_log_factor * std::log(std::max<double>(n, 2))));
  if (s < d) {
    throw Error(ErrorCode::InvalidInput, "approx_leverage_scores: embed_rows must be >= d");
  }
  r = std::max<Index>(r, 1);

  Rng rng(seed);
  const Mat sb = streamed_gaussian_embedding(b, s, rng);
  Eigen::HouseholderQR<Mat> dec(sb);
  const auto rfac = dec.matrixQR().topRows(d).template triangularView<Eigen::Upper>();

  const RVec diag = dec.matrixQR().diagonal().head(d).cwiseAbs();
  const double dmax = diag.maxCoeff();
  if (!(dmax > 0.0) ||
      diag.minCoeff() <= dmax * static_cast<double>(std::max(s, d)) * 1e-13) {
    throw Error(ErrorCode::RankDeficient,
                "approx_leverage_scores: embedded matrix is rank deficient; use exact_leverage_scores");
  }

  RMat g(d, r);
  const double jl_scale = 1.0 / std::sqrt(static_cast<double>(r));
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = rng.normal() * jl_scale;
  }
  // Rinv * G is d x r; B * (Rinv * G) is n x r.
  const Mat rinv_g = rfac.solve(g.cast<typename Mat::Scalar>());
  const Mat proj = b * rinv_g;
  return ScoreVector{proj.rowwise().squaredNorm()};
}

template <typename Mat>
Mat apply_impl(const SamplingSketch& sketch, const Mat& b) {
  if (sketch.source_rows != b.rows()) {
    throw Error(ErrorCode::InvalidInput, "apply_sketch: sketch built for a different row count");
  }
  Mat c(sketch.size(), b.cols());
  for (Index j = 0; j < sketch.size(); ++j) {
    const Pick& pick = sketch.picks[static_cast<std::size_t>(j)];
    if (pick.row < 0 || pick.row >= b.rows()) {
      throw Error(ErrorCode::InvalidInput, "apply_sketch: row index out of range");
    }
    c.row(j) = pick.weight * b.row(pick.row);
  }
  return c;
}

}  // namespace

ScoreVector exact_leverage_scores(const CMat& b) { return exact_scores_impl(b); }
ScoreVector exact_leverage_scores(const RMat& b) { return exact_scores_impl(b); }

ScoreVector approx_leverage_scores(const CMat& b, std::uint64_t seed, const ApproxLeverageOptions& opts) {
  return approx_scores_impl(b, seed, opts);
}

ScoreVector approx_leverage_scores(const RMat& b, std::uint64_t seed, const ApproxLeverageOptions& opts) {
  return approx_scores_impl(b, seed, opts);
}

ScoreVector approx_leverage_scores(const CMat& b, Index embed_rows, Index jl_cols, std::uint64_t seed) {
  ApproxLeverageOptions opts;
  opts.embed_rows = embed_rows;
  opts.jl_cols = jl_cols;
  return approx_scores_impl(b, seed, opts);
}

SamplingSketch build_sampling_sketch(const ScoreVector& probs, Index t, std::uint64_t seed) {
  if (t < 1) throw Error(ErrorCode::InvalidInput, "build_sampling_sketch: t must be >= 1");
  const Index n = probs.size();
  if (n == 0 || !probs.values.allFinite() || (probs.values.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidInput, "build_sampling_sketch: probabilities must be finite and non-negative");
  }
  const double sum = probs.total();
  if (sum == 0.0) throw Error(ErrorCode::InvalidInput, "build_sampling_sketch: all probabilities are zero");
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "build_sampling_sketch: probabilities must sum to 1");
  }

  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc += probs.values(i);
    cumulative[static_cast<std::size_t>(i)] = acc;
  }

  Rng rng(seed);
  SamplingSketch sketch;
  sketch.source_rows = n;
  sketch.picks.reserve(static_cast<std::size_t>(t));
  const double td = static_cast<double>(t);
  for (Index j = 0; j < t; ++j) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto row = static_cast<Index>(it - cumulative.begin());
    row = std::min(row, n - 1);
    // Rounding can land on a trailing zero-mass row; step back to a real one.
    while (probs.values(row) == 0.0 && row > 0) --row;
    sketch.picks.push_back({row, 1.0 / std::sqrt(td * probs.values(row))});
  }
  return sketch;
}

CMat apply_sketch(const SamplingSketch& sketch, const CMat& b) { return apply_impl(sketch, b); }
RMat apply_sketch(const SamplingSketch& sketch, const RMat& b) { return apply_impl(sketch, b); }

double gamma_factor(const CMat& b, const ScoreVector& approx_scores) {
  if (approx_scores.size() != b.rows()) {
    throw Error(ErrorCode::InvalidInput, "gamma_factor: score length does not match rows");
  }
  CMat acc = CMat::Zero(b.cols(), b.cols());
  for (Index i = 0; i < b.rows(); ++i) {
    const double row_sq = b.row(i).squaredNorm();
    if (row_sq == 0.0) continue;
    const double score = approx_scores.values(i);
    if (!(score > 0.0)) {
      throw Error(ErrorCode::InvalidInput,
                  "gamma_factor: zero score on nonzero row " + std::to_string(i));
    }
    acc.noalias() += (row_sq / score) * (b.row(i).adjoint() * b.row(i));
  }
  return spectral_norm(acc);
}

Index lowner_sample_count(Index d, double eps, double delta, double c) {
  return static_cast<Index>(
      std::ceil(c * static_cast<double>(d) * std::log(static_cast<double>(d) / delta) / (eps * eps)));
}

Index spectral_sample_count(Index d, double gamma, double eps, double delta, double c) {
  return static_cast<Index>(std::ceil(c * static_cast<double>(d) * gamma *
                                      std::log(static_cast<double>(d) / delta) / (eps * eps)));
}

}  // namespace nonpsd
