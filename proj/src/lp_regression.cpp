#include "nonpsd/lp_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nonpsd/rng.hpp"

namespace nonpsd {

LiftedRegression lift_instance(const CMat& a, const CVec& b) {
  if (a.rows() != b.size()) throw Error(ErrorCode::InvalidInput, "lift_instance: rows of A != length of b");
  require_finite(a, "lift_instance");
  if (!b.allFinite()) throw Error(ErrorCode::InvalidInput, "lift_instance: non-finite b");
  return LiftedRegression{lift_matrix(a), phi(b)};
}

ScoreVector lp_leverage_scores(const RMat& m, double p, const LpScoreOptions& opts) {
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorCode::InvalidInput, "lp_leverage_scores: p must be in [1, inf)");
  require_finite(m, "lp_leverage_scores");
  const Index n = m.rows();
  if (m.size() == 0) return ScoreVector{RVec::Zero(n)};

  auto exact_basis = [&]() -> RMat {
    Eigen::BDCSVD<RMat> dec(m, Eigen::ComputeThinU);
    const Index rank = numerical_rank(dec.singularValues(), m.rows(), m.cols());
    return dec.matrixU().leftCols(rank);
  };

  RMat basis;
  if (opts.embed_rows > 0) {
    const Index s = std::max(opts.embed_rows, m.cols());
    Rng rng(opts.seed);
    RMat sm = RMat::Zero(s, m.cols());
    RVec g(s);
    const double scale = 1.0 / std::sqrt(static_cast<double>(s));
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < s; ++k) g(k) = rng.normal() * scale;
      sm.noalias() += g * m.row(i);
    }
    Eigen::HouseholderQR<RMat> dec(sm);
    const RVec diag = dec.matrixQR().diagonal().head(m.cols()).cwiseAbs();
    const double dmax = diag.maxCoeff();
    if (dmax > 0.0 && diag.minCoeff() > dmax * static_cast<double>(s) * 1e-13) {
      const auto rfac = dec.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
      // U = M R^{-1}, computed as (R^{-T} M^T)^T.
      basis = rfac.transpose().solve(m.transpose()).transpose();
    } else {
      basis = exact_basis();
    }
  } else {
    basis = exact_basis();
  }
  ScoreVector out{RVec(n)};
  for (Index i = 0; i < n; ++i) out.values(i) = basis.row(i).cwiseAbs().array().pow(p).sum();
  return out;
}

double heavy_threshold(Index d, double p) {
  if (d < 1) throw Error(ErrorCode::InvalidInput, "heavy_threshold: d must be >= 1");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidInput, "heavy_threshold: p must be >= 1");
  const double inv_q = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  return std::pow(static_cast<double>(d), -inv_q - 1.0);
}

PairPartition PairPartition::all_heavy(Index pairs) {
  PairPartition out;
  out.is_heavy.assign(static_cast<std::size_t>(pairs), 1);
  for (Index i = 0; i < pairs; ++i) out.heavy.push_back(i);
  return out;
}

PairPartition classify_pairs(const ScoreVector& row_scores, Index d, double p) {
  if (row_scores.size() % 2 != 0) throw Error(ErrorCode::InvalidInput, "classify_pairs: odd score count");
  const double gamma = heavy_threshold(d, p);
  PairPartition out;
  const Index pairs = row_scores.size() / 2;
  out.is_heavy.resize(static_cast<std::size_t>(pairs));
  for (Index i = 0; i < pairs; ++i) {
    const bool heavy = row_scores.values(2 * i) >= gamma || row_scores.values(2 * i + 1) >= gamma;
    out.is_heavy[static_cast<std::size_t>(i)] = heavy ? 1 : 0;
    (heavy ? out.heavy : out.light).push_back(i);
  }
  return out;
}

Index BlockSketch::rows() const {
  Index total = 0;
  for (const RMat& blk : blocks) total += blk.rows();
  return total;
}

RMat BlockSketch::apply(const RMat& m) const {
  if (m.rows() != 2 * pairs()) throw Error(ErrorCode::InvalidInput, "BlockSketch::apply: row count != 2 * pairs");
  RMat out(rows(), m.cols());
  Index at = 0;
  for (Index i = 0; i < pairs(); ++i) {
    const RMat& blk = blocks[static_cast<std::size_t>(i)];
    out.middleRows(at, blk.rows()).noalias() = blk * m.middleRows(2 * i, 2);
    at += blk.rows();
  }
  return out;
}

RVec BlockSketch::apply(const RVec& v) const {
  if (v.size() != 2 * pairs()) throw Error(ErrorCode::InvalidInput, "BlockSketch::apply: length != 2 * pairs");
  RVec out(rows());
  Index at = 0;
  for (Index i = 0; i < pairs(); ++i) {
    const RMat& blk = blocks[static_cast<std::size_t>(i)];
    out.segment(at, blk.rows()).noalias() = blk * v.segment(2 * i, 2);
    at += blk.rows();
  }
  return out;
}

RMat BlockSketch::dense() const {
  RMat out = RMat::Zero(rows(), 2 * pairs());
  Index at = 0;
  for (Index i = 0; i < pairs(); ++i) {
    const RMat& blk = blocks[static_cast<std::size_t>(i)];
    out.block(at, 2 * i, blk.rows(), 2) = blk;
    at += blk.rows();
  }
  return out;
}

double gaussian_moment_scale(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorCode::InvalidInput, "gaussian_moment_scale: p must be in [1, inf)");
  const double base = std::sqrt(std::numbers::pi) / (std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0));
  return std::pow(base, 1.0 / p);
}

BlockSketch build_sketch_finite_p(const PairPartition& partition, Index t, double p, std::uint64_t seed) {
  if (t < 1) throw Error(ErrorCode::InvalidInput, "build_sketch_finite_p: t must be >= 1");
  const double sigma = gaussian_moment_scale(p);
  const double heavy_scale = sigma * std::pow(static_cast<double>(t), -1.0 / p);
  BlockSketch out;
  out.blocks.reserve(static_cast<std::size_t>(partition.pairs()));
  for (Index i = 0; i < partition.pairs(); ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const bool heavy = partition.is_heavy[static_cast<std::size_t>(i)] != 0;
    const Index r = heavy ? t : 1;
    const double scale = heavy ? heavy_scale : sigma;
    RMat blk(r, 2);
    for (Index row = 0; row < r; ++row) {
      blk(row, 0) = rng.normal() * scale;
      blk(row, 1) = rng.normal() * scale;
    }
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

RMat sign_enumeration(Index s) {
  if (s < 1) throw Error(ErrorCode::InvalidInput, "sign_enumeration: s must be >= 1");
  if (s > 20) throw Error(ErrorCode::Budget, "sign_enumeration: s > 20 would need more than 2^20 rows");
  const Index rows = Index{1} << s;
  RMat out(rows, s);
  for (Index r = 0; r < rows; ++r) {
    for (Index j = 0; j < s; ++j) out(r, j) = ((r >> j) & 1) != 0 ? -1.0 : 1.0;
  }
  return out;
}

BlockSketch build_sketch_inf(Index pairs, Index s, std::uint64_t seed) {
  const RMat signs = sign_enumeration(s);
  const double scale = std::sqrt(std::numbers::pi / 2.0) / static_cast<double>(s);
  BlockSketch out;
  out.blocks.reserve(static_cast<std::size_t>(pairs));
  for (Index i = 0; i < pairs; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    RMat g(s, 2);
    for (Index row = 0; row < s; ++row) {
      g(row, 0) = rng.normal() * scale;
      g(row, 1) = rng.normal() * scale;
    }
    out.blocks.push_back(signs * g);
  }
  return out;
}

double grouped_norm(const RVec& r, double p, Index group_size) {
  if (group_size == 1) {
    if (std::isinf(p)) return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
    const double scale = r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return scale * std::pow((r.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
  }
  if (group_size == 2) return mixed_norm(r, p);
  throw Error(ErrorCode::InvalidInput, "grouped_norm: group size must be 1 or 2");
}

namespace {

RVec group_sq_norms(const RVec& r, Index k) {
  const Index groups = r.size() / k;
  RVec out(groups);
  for (Index g = 0; g < groups; ++g) out(g) = r.segment(g * k, k).squaredNorm();
  return out;
}

// A consistent system: the least-squares residual is already at roundoff.
bool at_roundoff(double objective, const RVec& c, double p, Index k) {
  return objective <= 1e-12 * grouped_norm(c, p, k);
}

RVec least_squares(const RMat& m, const RVec& c) {
  if (m.cols() == 0) return RVec(0);
  return m.completeOrthogonalDecomposition().solve(c);
}

// Phi(y) = sum_g (||r_g||^2 + eps^2)^{p/2}, r = M y - c. Its per-group Hessian
// p s^{p/2-1} (I + (p-2) r r^T / s) is PSD for every p >= 1.
struct SmoothedPNorm {
  double value = 0.0;
  RVec grad;
  RMat hess;
};

double smoothed_pnorm_value(const RVec& r, Index k, double p, double eps) {
  return (group_sq_norms(r, k).array() + eps * eps).pow(p / 2.0).sum();
}

SmoothedPNorm smoothed_pnorm_full(const RMat& m, const RVec& r, Index k, double p, double eps) {
  const RVec s = (group_sq_norms(r, k).array() + eps * eps).matrix();
  const RVec coef = p * s.array().pow(p / 2.0 - 1.0);
  SmoothedPNorm out;
  out.value = s.array().pow(p / 2.0).sum();
  RVec q(r.size());
  RMat wm(m.rows(), m.cols());
  for (Index g = 0; g < s.size(); ++g) {
    if (k == 1) {
      q(g) = coef(g) * r(g);
      wm.row(g) = coef(g) * (1.0 + (p - 2.0) * r(g) * r(g) / s(g)) * m.row(g);
    } else {
      const Eigen::Vector2d rg = r.segment<2>(2 * g);
      q.segment<2>(2 * g) = coef(g) * rg;
      const Eigen::Matrix2d w =
          coef(g) * (Eigen::Matrix2d::Identity() + (p - 2.0) * rg * rg.transpose() / s(g));
      wm.middleRows<2>(2 * g).noalias() = w * m.middleRows<2>(2 * g);
    }
  }
  out.grad = m.transpose() * q;
  out.hess.noalias() = m.transpose() * wm;
  return out;
}

// Damped Newton on Phi with eps shrinking tenfold per stage down to the floor.
LpSolveResult solve_smoothed(const RMat& m, const RVec& c_in, double p, const LpSolveOptions& opts) {
  const Index k = opts.group_size;
  LpSolveResult out;
  RVec y = least_squares(m, c_in);
  RVec r = m * y - c_in;
  out.y = y;
  out.objective = grouped_norm(r, p, k);
  if (at_roundoff(out.objective, c_in, p, k) || m.cols() == 0) {
    out.converged = true;
    return out;
  }
  // Work in units of the largest starting group residual.
  const double scale = std::sqrt(group_sq_norms(r, k).maxCoeff());
  const RVec c = c_in / scale;
  y /= scale;
  r /= scale;
  const double floor = opts.smoothing_floor;
  double eps = std::max(floor, 0.1);
  Index total = 0;
  while (total < opts.max_iterations) {
    for (int it = 0; it < 100 && total < opts.max_iterations; ++it, ++total) {
      const SmoothedPNorm f = smoothed_pnorm_full(m, r, k, p, eps);
      RMat h = f.hess;
      h.diagonal().array() += 1e-14 * std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
      const RVec dir = -h.ldlt().solve(f.grad);
      const double slope = f.grad.dot(dir);
      if (!(slope < 0.0) || -slope / 2.0 <= opts.tol * f.value) break;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        const RVec y_try = y + alpha * dir;
        const RVec r_try = m * y_try - c;
        if (smoothed_pnorm_value(r_try, k, p, eps) <= f.value + 1e-4 * alpha * slope) {
          y = y_try;
          r = r_try;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    const double obj = scale * grouped_norm(r, p, k);
    if (obj <= out.objective) {
      out.objective = obj;
      out.y = scale * y;
    }
    if (eps <= floor) {
      out.converged = true;
      break;
    }
    eps = std::max(floor, eps * 0.1);
  }
  out.iterations = total;
  return out;
}

struct SmoothMax {
  double value = 0.0;
  RVec grad;
  RMat hess;
};

// tau * log sum_g exp(u_g / tau), u_g = sqrt(||r_g||^2 + tau^2).
double smooth_max_value(const RVec& r, Index k, double tau) {
  const RVec gsq = group_sq_norms(r, k);
  const RVec u = (gsq.array() + tau * tau).sqrt().matrix();
  const double umax = u.maxCoeff();
  return umax + tau * std::log(((u.array() - umax) / tau).exp().sum());
}

SmoothMax smooth_max_full(const RMat& m, const RVec& r, Index k, double tau) {
  const RVec gsq = group_sq_norms(r, k);
  const RVec u = (gsq.array() + tau * tau).sqrt().matrix();
  const double umax = u.maxCoeff();
  RVec pi = ((u.array() - umax) / tau).exp().matrix();
  const double z = pi.sum();
  pi /= z;
  SmoothMax out;
  out.value = umax + tau * std::log(z);

  std::vector<Index> active;
  for (Index g = 0; g < pi.size(); ++g) {
    if (pi(g) > 1e-17) active.push_back(g);
  }
  const Index cols = m.cols();
  const auto na = static_cast<Index>(active.size());
  RMat ma(na * k, cols);
  RMat wm(na * k, cols);
  RVec q(na * k);
  for (Index j = 0; j < na; ++j) {
    const Index g = active[static_cast<std::size_t>(j)];
    if (k == 1) {
      const double rhat = r(g) / u(g);
      ma.row(j) = m.row(g);
      wm.row(j) = pi(g) * ((1.0 - rhat * rhat) / u(g) + rhat * rhat / tau) * m.row(g);
      q(j) = pi(g) * rhat;
    } else {
      const Eigen::Vector2d rhat = r.segment<2>(2 * g) / u(g);
      const Eigen::Matrix2d w = pi(g) * ((Eigen::Matrix2d::Identity() - rhat * rhat.transpose()) / u(g) +
                                         rhat * rhat.transpose() / tau);
      ma.middleRows<2>(2 * j) = m.middleRows<2>(2 * g);
      wm.middleRows<2>(2 * j).noalias() = w * m.middleRows<2>(2 * g);
      q.segment<2>(2 * j) = pi(g) * rhat;
    }
  }
  out.grad = ma.transpose() * q;
  out.hess = ma.transpose() * wm;
  out.hess.noalias() -= out.grad * out.grad.transpose() / tau;
  return out;
}

LpSolveResult solve_inf(const RMat& m, const RVec& c, const LpSolveOptions& opts) {
  const Index k = opts.group_size;
  LpSolveResult out;
  RVec y = least_squares(m, c);
  RVec r = m * y - c;
  out.y = y;
  out.objective = grouped_norm(r, kInf, k);
  if (at_roundoff(out.objective, c, kInf, k) || m.cols() == 0) {
    out.converged = true;
    return out;
  }
  double tau = 0.1 * out.objective;
  Index total = 0;
  bool final_stage = false;
  while (total < opts.max_iterations) {
    const double stage_tol = final_stage ? 1e-14 * out.objective : 1e-6 * tau;
    for (int it = 0; it < 60 && total < opts.max_iterations; ++it, ++total) {
      const SmoothMax sm = smooth_max_full(m, r, k, tau);
      RMat h = sm.hess;
      const double reg = 1e-14 * std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
      h.diagonal().array() += reg;
      const RVec dir = -h.ldlt().solve(sm.grad);
      const double slope = sm.grad.dot(dir);
      if (!(slope < 0.0) || -slope / 2.0 <= stage_tol) break;
      double alpha = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        const RVec y_try = y + alpha * dir;
        const RVec r_try = m * y_try - c;
        if (smooth_max_value(r_try, k, tau) <= sm.value + 1e-4 * alpha * slope) {
          y = y_try;
          r = r_try;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    const double obj = grouped_norm(r, kInf, k);
    if (obj <= out.objective) {
      out.objective = obj;
      out.y = y;
    }
    if (final_stage) {
      out.converged = true;
      break;
    }
    if (tau <= opts.tol * out.objective) {
      final_stage = true;
    } else {
      tau *= 0.5;
    }
  }
  out.iterations = total;
  return out;
}

}  // namespace

LpSolveResult small_lp_solve(const RMat& m, const RVec& c, double p, const LpSolveOptions& opts) {
  if (m.rows() != c.size()) throw Error(ErrorCode::InvalidInput, "small_lp_solve: rows of M != length of c");
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidInput, "small_lp_solve: p must be >= 1");
  if (opts.group_size != 1 && opts.group_size != 2) {
    throw Error(ErrorCode::InvalidInput, "small_lp_solve: group size must be 1 or 2");
  }
  if (m.rows() % opts.group_size != 0) throw Error(ErrorCode::InvalidInput, "small_lp_solve: rows not divisible by group size");
  require_finite(m, "small_lp_solve");
  if (!c.allFinite()) throw Error(ErrorCode::InvalidInput, "small_lp_solve: non-finite c");

  if (p == 2.0) {
    LpSolveResult out;
    out.y = least_squares(m, c);
    out.objective = (m * out.y - c).norm();
    out.converged = true;
    out.iterations = 1;
    return out;
  }
  if (std::isinf(p)) return solve_inf(m, c, opts);
  return solve_smoothed(m, c, p, opts);
}

Index default_heavy_rows(Index d, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidInput, "default_heavy_rows: eps must lie in (0, 1)");
  const double t = std::ceil(4.0 * static_cast<double>(d) * std::log(2.0 / eps) / (eps * eps));
  return std::max<Index>(8, static_cast<Index>(t));
}

SketchSolveResult sketch_and_solve(const CMat& a, const CVec& b, double p, const SketchSolveParams& params) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidInput, "sketch_and_solve: p must be >= 1");
  const LiftedRegression lifted = lift_instance(a, b);
  const Index pairs = lifted.pairs();
  SketchSolveResult out;
  LpSolveResult solved;
  if (params.identity_sketch) {
    LpSolveOptions opts = params.solver;
    opts.group_size = 2;
    solved = small_lp_solve(lifted.ap, lifted.bp, p, opts);
    out.sketch_rows = lifted.ap.rows();
    out.heavy_pairs = 0;
  } else {
    BlockSketch sketch;
    if (std::isinf(p)) {
      sketch = build_sketch_inf(pairs, params.s, params.seed);
      out.heavy_pairs = pairs;
    } else {
      PairPartition partition;
      if (params.all_heavy) {
        partition = PairPartition::all_heavy(pairs);
      } else {
        RMat joined(lifted.ap.rows(), lifted.ap.cols() + 1);
        joined << lifted.ap, lifted.bp;
        partition = classify_pairs(lp_leverage_scores(joined, p), a.cols(), p);
      }
      const Index t = params.t > 0 ? params.t : default_heavy_rows(a.cols(), params.epsilon);
      sketch = build_sketch_finite_p(partition, t, p, params.seed);
      out.heavy_pairs = static_cast<Index>(partition.heavy.size());
    }
    LpSolveOptions opts = params.solver;
    opts.group_size = 1;
    solved = small_lp_solve(sketch.apply(lifted.ap), sketch.apply(lifted.bp), p, opts);
    out.sketch_rows = sketch.rows();
  }
  out.xhat = unphi(solved.y);
  out.sketched_objective = solved.objective;
  out.converged = solved.converged;
  return out;
}

}  // namespace nonpsd
