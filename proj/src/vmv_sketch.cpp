#include "nonpsd/vmv_sketch.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "nonpsd/rng.hpp"

namespace nonpsd {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class DftPlans {
 public:
  explicit DftPlans(int k) {
    std::vector<fftw_complex> in(static_cast<std::size_t>(k));
    std::vector<fftw_complex> out(static_cast<std::size_t>(k));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(k, in.data(), out.data(), FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(k, in.data(), out.data(), FFTW_BACKWARD, flags);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw Error(ErrorCode::InvalidInput, "TensorSketch: could not plan a DFT of this length");
    }
  }
  DftPlans(const DftPlans&) = delete;
  DftPlans& operator=(const DftPlans&) = delete;

  void forward(const CVec& in, CVec& out) const { run(forward_, in, out); }
  void backward(const CVec& in, CVec& out) const { run(backward_, in, out); }

 private:
  static void run(fftw_plan plan, const CVec& in, CVec& out) {
    // The plan is out-of-place and the input is not modified.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
  }

  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

const DftPlans& plans_for(Index k) {
  static std::mutex mu;
  static std::map<Index, std::unique_ptr<DftPlans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    it = cache.emplace(k, std::make_unique<DftPlans>(static_cast<int>(k))).first;
  }
  return *it->second;
}

}  // namespace

TensorSketch::TensorSketch(Index k, std::uint64_t seed) : k_(k), seed_(seed) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "TensorSketch: k must be >= 1");
  if (k > (Index{1} << 30)) throw Error(ErrorCode::Budget, "TensorSketch: k too large");
  Rng rng(seed);
  for (auto* tables : {&bucket_tables_, &sign_tables_}) {
    for (Table& table : *tables) {
      for (auto& row : table) {
        for (auto& entry : row) entry = rng();
      }
    }
  }
  acc_ = CVec::Zero(k);
  plans_for(k);
}

std::uint64_t TensorSketch::tab_hash(const Table& table, std::uint64_t key) {
  std::uint64_t h = 0;
  for (std::size_t byte = 0; byte < 8; ++byte) {
    h ^= table[byte][(key >> (8 * byte)) & 0xffu];
  }
  return h;
}

Index TensorSketch::bucket(int which, Index coord) const {
  const std::uint64_t h = tab_hash(bucket_tables_[static_cast<std::size_t>(which)], static_cast<std::uint64_t>(coord));
  return static_cast<Index>((static_cast<unsigned __int128>(h) * static_cast<std::uint64_t>(k_)) >> 64);
}

double TensorSketch::sign(int which, Index coord) const {
  const std::uint64_t h = tab_hash(sign_tables_[static_cast<std::size_t>(which)], static_cast<std::uint64_t>(coord));
  return (h >> 63) != 0 ? -1.0 : 1.0;
}

CVec TensorSketch::count_sketch(int which, const CVec& x) const {
  if (which != 0 && which != 1) throw Error(ErrorCode::InvalidInput, "count_sketch: which must be 0 or 1");
  CVec out = CVec::Zero(k_);
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) == cplx(0.0, 0.0)) continue;
    out(bucket(which, i)) += sign(which, i) * x(i);
  }
  return out;
}

CVec TensorSketch::pair(const CVec& a, const CVec& b) const {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidInput, "ts_pair: vector lengths differ");
  const DftPlans& dft = plans_for(k_);
  const CVec ca = count_sketch(0, a);
  const CVec cb = count_sketch(1, b);
  CVec fa(k_), fb(k_), out(k_);
  dft.forward(ca, fa);
  dft.forward(cb, fb);
  fa.array() *= fb.array();
  dft.backward(fa, out);
  out /= static_cast<double>(k_);
  return out;
}

void TensorSketch::ingest(const CVec& a, const CVec& b) { acc_ += pair(a, b); }

cplx TensorSketch::estimate(const CVec& u, const CVec& v) const {
  const CVec p = query(u, v);
  return (p.array() * acc_.array()).sum();
}

bool TensorSketch::same_hashes(const TensorSketch& other) const {
  return k_ == other.k_ && bucket_tables_ == other.bucket_tables_ && sign_tables_ == other.sign_tables_;
}

void TensorSketch::merge(const TensorSketch& other) {
  if (!same_hashes(other)) throw Error(ErrorCode::InvalidInput, "TensorSketch::merge: states use different hashes");
  acc_ += other.acc_;
}

cplx estimate_vmv(const CMat& a, const CMat& b, const CVec& u, const CVec& v, Index k, Index reps,
                  std::uint64_t seed) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::InvalidInput, "estimate_vmv: A and B row counts differ");
  if (u.size() != a.cols() || v.size() != b.cols()) {
    throw Error(ErrorCode::InvalidInput, "estimate_vmv: u or v length does not match");
  }
  if (a.cols() != b.cols()) throw Error(ErrorCode::InvalidInput, "estimate_vmv: A and B column counts differ");
  if (reps < 1) throw Error(ErrorCode::InvalidInput, "estimate_vmv: reps must be >= 1");

  std::vector<cplx> estimates;
  estimates.reserve(static_cast<std::size_t>(reps));
  for (Index r = 0; r < reps; ++r) {
    TensorSketch state(k, derive_seed(seed, static_cast<std::uint64_t>(r)));
    for (Index i = 0; i < a.rows(); ++i) {
      state.ingest(a.row(i).transpose(), b.row(i).transpose());
    }
    estimates.push_back(state.estimate(u, v));
  }
  if (reps == 1) return estimates.front();

  const Index group = (reps + 2) / 3;
  std::vector<double> re, im;
  for (Index start = 0; start < reps; start += group) {
    const Index end = std::min(reps, start + group);
    cplx sum(0.0, 0.0);
    for (Index j = start; j < end; ++j) sum += estimates[static_cast<std::size_t>(j)];
    sum /= static_cast<double>(end - start);
    re.push_back(sum.real());
    im.push_back(sum.imag());
  }
  auto median = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size();
    return m % 2 == 1 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
  };
  return {median(re), median(im)};
}

Index vmv_bucket_count(double u_norm, double v_norm, double frob_atb, double eps, double c) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "vmv_bucket_count: eps must be > 0");
  const double k = std::ceil(c * u_norm * u_norm * v_norm * v_norm * frob_atb * frob_atb / (eps * eps));
  if (!std::isfinite(k) || k > static_cast<double>(Index{1} << 30)) {
    throw Error(ErrorCode::Budget, "vmv_bucket_count: bucket count too large");
  }
  return std::max<Index>(1, static_cast<Index>(k));
}

}  // namespace nonpsd
