#include "nonpsd/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace nonpsd {

namespace {

// Positive tau with ||z + tau d|| = radius.
double boundary_tau(const RVec& z, const RVec& d, double radius) {
  const double a = d.squaredNorm();
  const double b = 2.0 * z.dot(d);
  const double c = z.squaredNorm() - radius * radius;
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  // Stable root selection for the positive branch.
  if (b >= 0.0) return (-2.0 * c) / (b + disc);
  return (-b + disc) / (2.0 * a);
}

}  // namespace

CgResult cg_solve(const LinearOperator& hessp, const RVec& g, const KrylovOptions& opts) {
  const Index d = g.size();
  CgResult out;
  out.step = RVec::Zero(d);
  const double gnorm = g.norm();
  if (gnorm == 0.0) {
    out.converged = true;
    return out;
  }
  RVec r = g;  // residual H p + g
  RVec dir = -r;
  double rr = r.squaredNorm();
  for (Index it = 0; it < opts.max_iterations; ++it) {
    const RVec hd = hessp(dir);
    const double curv = dir.dot(hd);
    out.iterations = it + 1;
    if (!(curv > 0.0)) {
      out.negative_curvature = true;
      if (it == 0) out.step = -g;
      return out;
    }
    const double alpha = rr / curv;
    out.step += alpha * dir;
    r += alpha * hd;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= opts.rel_tol * gnorm) {
      out.converged = true;
      return out;
    }
    dir = -r + (rr_next / rr) * dir;
    rr = rr_next;
  }
  return out;
}

MinnormResult minnorm_lsq(const LinearOperator& hessp, const RVec& g, const KrylovOptions& opts) {
  const Index d = g.size();
  MinnormResult out;
  out.step = RVec::Zero(d);
  out.hg = hessp(g);
  const RVec& hg = out.hg;
  const double beta1 = hg.norm();
  if (beta1 == 0.0 || g.norm() == 0.0) {
    out.converged = true;
    return out;
  }
  const Index cap = std::max<Index>(1, std::min(opts.max_iterations, d));
  RMat v(d, cap + 1);
  RMat t = RMat::Zero(cap + 2, cap + 1);
  RVec c = RVec::Zero(cap + 1);  // c_j = v_j^T g
  v.col(0) = hg / beta1;
  c(0) = v.col(0).dot(g);
  double hnorm = 0.0;
  RVec prev_y;

  auto solve_small = [&](Index k, Index rows) -> RVec {
    return t.topLeftCorner(rows, k).colPivHouseholderQr().solve(-c.head(rows));
  };

  for (Index j = 0; j < cap; ++j) {
    RVec z = hessp(v.col(j));
    const double alpha = v.col(j).dot(z);
    z -= alpha * v.col(j);
    if (j > 0) z -= t(j, j - 1) * v.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      z -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * z);
    }
    const double beta = z.norm();
    t(j, j) = alpha;
    hnorm = std::max({hnorm, std::abs(alpha), beta});
    const Index k = j + 1;
    out.iterations = k;
    const bool invariant = beta <= 1e-12 * hnorm || k == d;
    if (invariant) {
      // H V_k = V_k T_k: the square system is exact.
      const RVec y = solve_small(k, k);
      out.step = v.leftCols(k) * y;
      out.converged = true;
      return out;
    }
    t(j + 1, j) = beta;
    t(j, j + 1) = beta;
    v.col(j + 1) = z / beta;
    c(j + 1) = v.col(j + 1).dot(g);

    // With T-bar_k known, the residual of the previous iterate is exact:
    // H (H V_{k-1} y + g) = V_{k+1} (T-bar_k T-bar_{k-1} y + beta1 e1).
    if (k >= 2) {
      const RVec u = t.topLeftCorner(k, k - 1) * prev_y;
      RVec hr = t.topLeftCorner(k + 1, k) * u;
      hr(0) += beta1;
      if (hr.norm() <= opts.rel_tol * beta1) {
        out.step = v.leftCols(k - 1) * prev_y;
        out.iterations = k;
        out.converged = true;
        return out;
      }
    }
    prev_y = solve_small(k, k + 1);
  }
  out.step = v.leftCols(cap) * prev_y;
  return out;
}

SteihaugResult cg_steihaug(const LinearOperator& hessp, const RVec& g, double radius,
                           const KrylovOptions& opts) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "cg_steihaug: radius must be > 0");
  const Index d = g.size();
  SteihaugResult out;
  out.step = RVec::Zero(d);
  const double gnorm = g.norm();
  if (gnorm == 0.0) return out;

  RVec z = RVec::Zero(d);
  RVec hz = RVec::Zero(d);
  RVec r = g;
  RVec dir = -g;
  double rr = r.squaredNorm();
  auto finish = [&](const RVec& p, const RVec& hp, SteihaugExit exit) {
    out.step = p;
    out.model_value = g.dot(p) + 0.5 * p.dot(hp);
    out.exit = exit;
    return out;
  };

  for (Index it = 0; it < opts.max_iterations; ++it) {
    const RVec hd = hessp(dir);
    const double curv = dir.dot(hd);
    out.iterations = it + 1;
    if (!(curv > 0.0)) {
      const double tau = boundary_tau(z, dir, radius);
      return finish(z + tau * dir, hz + tau * hd, SteihaugExit::NegativeCurvature);
    }
    const double alpha = rr / curv;
    const RVec z_next = z + alpha * dir;
    if (z_next.norm() >= radius) {
      const double tau = boundary_tau(z, dir, radius);
      return finish(z + tau * dir, hz + tau * hd, SteihaugExit::Boundary);
    }
    z = z_next;
    hz += alpha * hd;
    r += alpha * hd;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= opts.rel_tol * gnorm) return finish(z, hz, SteihaugExit::Interior);
    dir = -r + (rr_next / rr) * dir;
    rr = rr_next;
  }
  return finish(z, hz, SteihaugExit::MaxIterations);
}

}  // namespace nonpsd
