#include "nonpsd/bench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nonpsd/rng.hpp"

namespace nonpsd::bench {

Dataset synth_planted(Index n, Index d, Index heavy_rows, double heavy_scale, std::uint64_t seed) {
  if (n < 1 || d < 1) throw Error(ErrorCode::InvalidInput, "synth_planted: n and d must be >= 1");
  if (heavy_rows < 0 || heavy_rows >= n) throw Error(ErrorCode::InvalidInput, "synth_planted: need 0 <= heavy_rows < n");
  if (!(heavy_scale > 0.0) || !std::isfinite(heavy_scale)) {
    throw Error(ErrorCode::InvalidInput, "synth_planted: heavy_scale must be finite and > 0");
  }
  Rng rng(seed);
  Dataset out;
  out.a.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) out.a(i, j) = rng.normal();
  }

  // Partial Fisher-Yates for the heavy row positions.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index k = 0; k < heavy_rows; ++k) {
    const Index pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick)]);
    RVec dir(d);
    for (Index j = 0; j < d; ++j) dir(j) = rng.normal();
    dir /= dir.norm();
    out.a.row(order[static_cast<std::size_t>(k)]) = heavy_scale * std::sqrt(static_cast<double>(d)) * dir.transpose();
  }

  RVec w(d);
  for (Index j = 0; j < d; ++j) w(j) = rng.normal() / std::sqrt(static_cast<double>(d));
  const RVec margins = out.a * w;
  out.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    double label = margins(i) > 0.0 ? 1.0 : 0.0;
    if (rng.uniform() < 0.1) label = 1.0 - label;
    out.labels(i) = label;
  }
  out.description = "synth_planted n=" + std::to_string(n) + " d=" + std::to_string(d) +
                    " heavy_rows=" + std::to_string(heavy_rows);
  return out;
}

CMat complex_gaussian(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  CMat a(n, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = rng.normal();
      a(i, j) = cplx(re * s, rng.normal() * s);
    }
  }
  return a;
}

}  // namespace nonpsd::bench
