#pragma once

// Degree-2 TensorSketch of M = A^T B = sum_i a_i (x) b_i and estimation of
// the bilinear form u^T A^T B v.

#include <array>
#include <cstdint>

#include "nonpsd/core_complex.hpp"

namespace nonpsd {

/// Hash h_j: index -> [k] and sign s_j: index -> {-1, +1} for j in {0, 1},
/// drawn from simple tabulation hashing (3-wise independent). The accumulator
/// is the only mutable part; a state has a single writer.
class TensorSketch {
 public:
  /// ts_new. Throws InvalidInput for k < 1.
  TensorSketch(Index k, std::uint64_t seed);

  Index buckets() const { return k_; }
  std::uint64_t seed() const { return seed_; }

  Index bucket(int which, Index coord) const;
  double sign(int which, Index coord) const;

  /// CountSketch of x with (h_which, s_which).
  CVec count_sketch(int which, const CVec& x) const;

  /// ts_pair: circular convolution of the two CountSketches via length-k DFTs.
  CVec pair(const CVec& a, const CVec& b) const;

  void ingest(const CVec& a, const CVec& b);
  CVec query(const CVec& u, const CVec& v) const { return pair(u, v); }
  /// Non-conjugated <query(u, v), q>.
  cplx estimate(const CVec& u, const CVec& v) const;

  const CVec& accumulator() const { return acc_; }
  /// Adds another state's accumulator. Throws InvalidInput unless it shares k and seed.
  void merge(const TensorSketch& other);
  bool same_hashes(const TensorSketch& other) const;

 private:
  using Table = std::array<std::array<std::uint64_t, 256>, 8>;

  static std::uint64_t tab_hash(const Table& table, std::uint64_t key);

  Index k_;
  std::uint64_t seed_;
  std::array<Table, 2> bucket_tables_;
  std::array<Table, 2> sign_tables_;
  CVec acc_;
};

/// Ingests rows a_i = A.row(i), b_i = B.row(i) into `reps` independent states
/// and returns the coordinate-wise (real, imaginary) median of the means of
/// consecutive groups of ceil(reps/3) estimates.
cplx estimate_vmv(const CMat& a, const CMat& b, const CVec& u, const CVec& v, Index k, Index reps,
                  std::uint64_t seed);

/// ceil(c ||u||^2 ||v||^2 ||A^T B||_F^2 / eps^2), at least 1.
Index vmv_bucket_count(double u_norm, double v_norm, double frob_atb, double eps, double c = 9.0);

}  // namespace nonpsd
