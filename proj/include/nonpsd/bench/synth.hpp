#pragma once

// Synthetic instances for the benchmark runners.

#include <cstdint>

#include "nonpsd/bench/dataset.hpp"

namespace nonpsd::bench {

/// n i.i.d. N(0, I_d) rows, of which `heavy_rows` (chosen at random) are
/// replaced by heavy_scale * sqrt(d) * (uniform random unit vector). Labels
/// follow a planted sigmoid model sign(a_i^T w), w ~ N(0, I/d), with 10% of
/// them flipped. Throws InvalidInput unless 0 <= heavy_rows < n.
Dataset synth_planted(Index n, Index d, Index heavy_rows, double heavy_scale, std::uint64_t seed);

/// Complex Gaussian A (n x d) with entries (N(0,1) + i N(0,1)) / sqrt(2).
CMat complex_gaussian(Index n, Index d, std::uint64_t seed);

}  // namespace nonpsd::bench
