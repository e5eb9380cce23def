// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>
#include <numeric>
#ifdef CONCBOUND_SDP_TRACE
#include <cstdio>
#endif

#include "concbound/core.hpp"

namespace concbound::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

std::size_t ConeStructure::dim() const {
  std::size_t d = nonneg;
  for (std::size_t k : psd) d += svec_size(k);
  return d;
}

std::size_t ConeStructure::degree() const {
  return std::accumulate(psd.begin(), psd.end(), nonneg);
}

std::size_t svec_index(std::size_t k, std::size_t i, std::size_t j) {
  if (i < j) std::swap(i, j);
  return j * k - j * (j - 1) / 2 + (i - j);
}

VectorXd svec(const MatrixXd& m) {
  const auto k = static_cast<std::size_t>(m.rows());
  VectorXd v(svec_size(k));
  std::size_t idx = 0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i)
      v(idx++) = i == j ? m(i, j) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  return v;
}

MatrixXd smat(const Eigen::Ref<const VectorXd>& v, std::size_t k) {
  MatrixXd m(k, k);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = j; i < k; ++i) {
      const double e = v(idx++);
      if (i == j) {
        m(i, i) = e;
      } else {
        m(i, j) = e / kSqrt2;
        m(j, i) = e / kSqrt2;
      }
    }
  return m;
}

std::size_t ConicProgram::psd_offset(std::size_t k) const {
  std::size_t off = cones.nonneg;
  for (std::size_t b = 0; b < k; ++b) off += svec_size(cones.psd.at(b));
  return off;
}

void ConicProgram::add_psd_entry(std::size_t row, std::size_t k, std::size_t i,
                                 std::size_t j, double coef) {
  const std::size_t side = cones.psd.at(k);
  const std::size_t col = psd_offset(k) + svec_index(side, i, j);
  A(row, col) += i == j ? coef : coef / kSqrt2;
}

void ConicProgram::add_psd_objective(std::size_t k, std::size_t i, std::size_t j,
                                     double coef) {
  const std::size_t side = cones.psd.at(k);
  const std::size_t col = psd_offset(k) + svec_index(side, i, j);
  c(col) += i == j ? coef : coef / kSqrt2;
}

void ConicProgram::check() const {
  if (static_cast<std::size_t>(c.size()) != cones.dim())
    throw InvalidArgument("conic program: objective size does not match cones");
  if (A.cols() != c.size() || A.rows() != b.size())
    throw InvalidArgument("conic program: constraint matrix has wrong shape");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite())
    throw InvalidArgument("conic program: non-finite data");
}

std::string to_json(const ConicProgram& p) {
  nlohmann::json j;
  j["objective"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.A.rows(); ++i)
    for (Eigen::Index k = 0; k < p.A.cols(); ++k)
      if (p.A(i, k) != 0.0) rows.push_back({i, k, p.A(i, k)});
  j["rows"] = rows;
  j["rhs"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  j["cones"] = {{"nonneg", p.cones.nonneg}, {"psd", p.cones.psd}};
  return j.dump();
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_limit: return "numerical_limit";
  }
  return "unknown";
}

double Residuals::max() const { return std::max({primal, dual, gap}); }

Residuals kkt_residuals(const ConicProgram& p, const VectorXd& x, const VectorXd& y,
                        const VectorXd& s) {
  Residuals r;
  r.primal = (p.A * x - p.b).norm() / (1.0 + p.b.norm());
  r.dual = (p.A.transpose() * y + s - p.c).norm() / (1.0 + p.c.norm());
  const double px = p.c.dot(x), dy = p.b.dot(y);
  r.gap = std::abs(px - dy) / (1.0 + std::abs(px) + std::abs(dy));
  return r;
}

double cone_min(const ConeStructure& k, const VectorXd& v) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k.nonneg; ++i) m = std::min(m, v(i));
  std::size_t off = k.nonneg;
  for (std::size_t side : k.psd) {
    const std::size_t len = svec_size(side);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(v.segment(off, len), side),
                                               Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
    off += len;
  }
  return m;
}

namespace {

// ---------------------------------------------------------------------------
// Presolve: row scaling and removal of linearly dependent equalities.
// ---------------------------------------------------------------------------

struct Presolved {
  MatrixXd A;
  VectorXd b;
  std::vector<std::size_t> kept;     // original row index of each kept row
  std::vector<std::size_t> removed;  // original indices
  VectorXd row_scale;                // kept row i was multiplied by row_scale(i)
  bool inconsistent = false;
};

Presolved presolve(const ConicProgram& p) {
  Presolved out;
  const Eigen::Index m = p.A.rows();
  if (m == 0) {
    out.A = p.A;
    out.b = p.b;
    out.row_scale = VectorXd();
    return out;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(p.A.transpose());
  qr.setThreshold(1e-11);
  const Eigen::Index rank = qr.rank();
  std::vector<std::size_t> keep;
  for (Eigen::Index i = 0; i < rank; ++i)
    keep.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()(i)));
  std::sort(keep.begin(), keep.end());
  std::vector<char> is_kept(m, 0);
  for (auto i : keep) is_kept[i] = 1;
  for (Eigen::Index i = 0; i < m; ++i)
    if (!is_kept[i]) out.removed.push_back(static_cast<std::size_t>(i));

  MatrixXd Ak(keep.size(), p.A.cols());
  VectorXd bk(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    Ak.row(i) = p.A.row(keep[i]);
    bk(i) = p.b(keep[i]);
  }
  if (!out.removed.empty()) {
    // Each removed row must be the same combination of kept rows on b.
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Ak.transpose());
    for (auto r : out.removed) {
      VectorXd lam = cod.solve(p.A.row(r).transpose());
      const double resid = (Ak.transpose() * lam - p.A.row(r).transpose()).norm();
      const double bdiff = std::abs(lam.dot(bk) - p.b(r));
      if (resid > 1e-8 * (1.0 + p.A.row(r).norm()) ||
          bdiff > 1e-8 * (1.0 + std::abs(p.b(r)) + bk.norm()))
        out.inconsistent = true;
    }
  }
  out.row_scale.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const double nrm = Ak.row(i).norm();
    out.row_scale(i) = nrm > 0 ? 1.0 / nrm : 1.0;
    Ak.row(i) *= out.row_scale(i);
    bk(i) *= out.row_scale(i);
  }
  out.A = std::move(Ak);
  out.b = std::move(bk);
  out.kept = std::move(keep);
  return out;
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling for the product cone.
// ---------------------------------------------------------------------------

struct PsdScaling {
  std::size_t side = 0;
  std::size_t offset = 0;
  MatrixXd G, Ginv, W, Winv;
  VectorXd lam;
};

struct Scaling {
  std::size_t nonneg = 0;
  VectorXd w;    // orthant: sqrt(x/s)
  VectorXd lam;  // orthant: sqrt(x s)
  std::vector<PsdScaling> blocks;
};

// Factor M = F F' for symmetric positive definite M; falls back to an
// eigen-decomposition when Cholesky breaks down.
MatrixXd psd_factor(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  VectorXd ev = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

Scaling make_scaling(const ConeStructure& k, const VectorXd& x, const VectorXd& s) {
  Scaling sc;
  sc.nonneg = k.nonneg;
  sc.w.resize(k.nonneg);
  sc.lam.resize(k.nonneg);
  for (std::size_t i = 0; i < k.nonneg; ++i) {
    sc.w(i) = std::sqrt(x(i) / s(i));
    sc.lam(i) = std::sqrt(x(i) * s(i));
  }
  std::size_t off = k.nonneg;
  for (std::size_t side : k.psd) {
    const std::size_t len = svec_size(side);
    PsdScaling b;
    b.side = side;
    b.offset = off;
    MatrixXd L = psd_factor(smat(x.segment(off, len), side));
    MatrixXd R = psd_factor(smat(s.segment(off, len), side));
    Eigen::JacobiSVD<MatrixXd> svd(R.transpose() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
    b.lam = svd.singularValues();
    VectorXd isq = b.lam.cwiseSqrt().cwiseInverse();
    b.G = L * svd.matrixV() * isq.asDiagonal();
    b.Ginv = b.G.inverse();
    b.W = b.G * b.G.transpose();
    b.Winv = b.Ginv.transpose() * b.Ginv;
    sc.blocks.push_back(std::move(b));
    off += len;
  }
  return sc;
}

// H^{-1}(v): W V W on PSD blocks, w^2 v on the orthant.
VectorXd apply_hinv(const Scaling& sc, const VectorXd& v) {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < sc.nonneg; ++i) out(i) = sc.w(i) * sc.w(i) * v(i);
  for (const auto& b : sc.blocks) {
    const std::size_t len = svec_size(b.side);
    MatrixXd V = smat(v.segment(b.offset, len), b.side);
    out.segment(b.offset, len) = svec(b.W * V * b.W);
  }
  return out;
}

// Scaled directions dx~ = G^{-1} dX G^{-T}, ds~ = G' dS G, per block.
struct Scaled {
  VectorXd orth;
  std::vector<MatrixXd> blocks;
};

Scaled scale_x(const Scaling& sc, const VectorXd& dx) {
  Scaled o;
  o.orth = dx.head(sc.nonneg).cwiseQuotient(sc.w);
  for (const auto& b : sc.blocks) {
    MatrixXd D = smat(dx.segment(b.offset, svec_size(b.side)), b.side);
    o.blocks.push_back(b.Ginv * D * b.Ginv.transpose());
  }
  return o;
}

Scaled scale_s(const Scaling& sc, const VectorXd& ds) {
  Scaled o;
  o.orth = ds.head(sc.nonneg).cwiseProduct(sc.w);
  for (const auto& b : sc.blocks) {
    MatrixXd D = smat(ds.segment(b.offset, svec_size(b.side)), b.side);
    o.blocks.push_back(b.G.transpose() * D * b.G);
  }
  return o;
}

// Largest step a in (0, inf] keeping lam + a*d in the cone (scaled space).
double max_step(const Scaling& sc, const Scaled& d) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sc.nonneg; ++i)
    if (d.orth(i) < 0) a = std::min(a, -sc.lam(i) / d.orth(i));
  for (std::size_t k = 0; k < sc.blocks.size(); ++k) {
    const auto& b = sc.blocks[k];
    VectorXd is = b.lam.cwiseSqrt().cwiseInverse();
    MatrixXd T = is.asDiagonal() * d.blocks[k] * is.asDiagonal();
    T = 0.5 * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues()(0);
    if (mn < 0) a = std::min(a, -1.0 / mn);
  }
  return a;
}

// Right-hand side of the linearized complementarity, in scaled space.
struct Comp {
  VectorXd orth;
  std::vector<MatrixXd> blocks;
};

struct Direction {
  VectorXd dx, dy, ds;
  double dtau = 0.0, dkappa = 0.0;
};

struct Iterate {
  VectorXd x, y, s;
  double tau = 1.0, kappa = 1.0;
};

class HsdSolver {
 public:
  HsdSolver(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
            const ConeStructure& k)
      : A_(A), b_(b), c_(c), k_(k) {}

  // Runs the iteration; returns the final iterate and a status.
  Status run(const Tolerances& tol, Iterate& it, int& iterations) {
    const std::size_t nvar = k_.dim();
    const double nu = double(k_.degree()) + 1.0;
    it.x = identity();
    it.s = identity();
    it.y = VectorXd::Zero(b_.size());
    it.tau = it.kappa = 1.0;

    const double bnorm = 1.0 + b_.norm(), cnorm = 1.0 + c_.norm();
    int stall = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    Iterate best = it;
    bool have_best = false;

    for (iterations = 0; iterations < tol.max_iterations; ++iterations) {
      const VectorXd rp = b_ * it.tau - A_ * it.x;
      const VectorXd rd = c_ * it.tau - A_.transpose() * it.y - it.s;
      const double rg = it.kappa + c_.dot(it.x) - b_.dot(it.y);
      const double mu = (it.x.dot(it.s) + it.tau * it.kappa) / nu;

      // Convergence and certificates.
      const double pres = (A_ * it.x / it.tau - b_).norm() / bnorm;
      const double dres = (A_.transpose() * it.y / it.tau + it.s / it.tau - c_).norm() / cnorm;
      const double pobj = c_.dot(it.x) / it.tau, dobj = b_.dot(it.y) / it.tau;
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (pres <= tol.feasibility && dres <= tol.feasibility && gap <= tol.gap)
        return Status::optimal;
      const double merit = std::max({pres, dres, gap});
#ifdef CONCBOUND_SDP_TRACE
      std::fprintf(stderr, "it %3d pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e mu %.2e pobj %.10g\n",
                   iterations, pres, dres, gap, it.tau, it.kappa, mu, pobj);
#endif
      if (merit < best_merit) {
        best_merit = merit;
        best = it;
        have_best = true;
      }
      const double by = b_.dot(it.y), cx = c_.dot(it.x);
      if (by > 0 && (A_.transpose() * it.y + it.s).norm() <= tol.feasibility * by &&
          it.tau < 1e-6 * it.kappa)
        return Status::infeasible;
      if (cx < 0 && (A_ * it.x).norm() <= tol.feasibility * (-cx) &&
          it.tau < 1e-6 * it.kappa)
        return Status::unbounded;
      (void)nvar;

      Scaling sc = make_scaling(k_, it.x, it.s);
      if (!factor_schur(sc)) {
#ifdef CONCBOUND_SDP_TRACE
        std::fprintf(stderr, "schur factorization failed\n");
#endif
        break;
      }

      // Direction pieces independent of the right-hand side.
      const VectorXd hc = apply_hinv(sc, c_);
      const VectorXd q = solve_schur(b_ + A_ * hc);
      const VectorXd wv = apply_hinv(sc, A_.transpose() * q) - hc;
      const double denom_base = b_.dot(q) - c_.dot(wv);

      // Predictor.
      Comp pc = affine_comp(sc);
      Direction da = direction(sc, it, rp, rd, rg, 1.0, pc, -it.tau * it.kappa, q, wv,
                               denom_base);
      const double aa = std::min(1.0, step_to_boundary(sc, it, da));
      const double sigma = std::clamp(std::pow(1.0 - aa, 3.0), 0.0, 1.0);

      // Corrector.
      Scaled dxa = scale_x(sc, da.dx), dsa = scale_s(sc, da.ds);
      Comp cc = center_comp(sc, sigma * mu, dxa, dsa);
      const double rtau = sigma * mu - it.tau * it.kappa - da.dtau * da.dkappa;
      Direction d = direction(sc, it, rp, rd, rg, 1.0 - sigma, cc, rtau, q, wv, denom_base);
      const double amax = step_to_boundary(sc, it, d);
      const double alpha = std::min(1.0, 0.99 * amax);
      if (!(alpha > 1e-12) || !d.dx.allFinite() || !d.dy.allFinite()) {
#ifdef CONCBOUND_SDP_TRACE
        std::fprintf(stderr, "step rejected: alpha %.3e\n", alpha);
#endif
        break;
      }

      it.x += alpha * d.dx;
      it.y += alpha * d.dy;
      it.s += alpha * d.ds;
      it.tau += alpha * d.dtau;
      it.kappa += alpha * d.dkappa;

      stall = alpha < 1e-6 ? stall + 1 : 0;
      if (stall > 20) break;
    }
    if (have_best) it = best;
    return Status::numerical_limit;
  }

 private:
  VectorXd identity() const {
    VectorXd e = VectorXd::Zero(k_.dim());
    for (std::size_t i = 0; i < k_.nonneg; ++i) e(i) = 1.0;
    std::size_t off = k_.nonneg;
    for (std::size_t side : k_.psd) {
      for (std::size_t i = 0; i < side; ++i) e(off + svec_index(side, i, i)) = 1.0;
      off += svec_size(side);
    }
    return e;
  }

  bool factor_schur(const Scaling& sc) {
    const Eigen::Index m = A_.rows();
    MatrixXd HAt(A_.cols(), m);
    for (Eigen::Index i = 0; i < m; ++i) HAt.col(i) = apply_hinv(sc, A_.row(i).transpose());
    MatrixXd M = A_ * HAt;
    M = 0.5 * (M + M.transpose());
    llt_.compute(M);
    if (llt_.info() == Eigen::Success) {
      use_ldlt_ = false;
      return true;
    }
    ldlt_.compute(M);
    use_ldlt_ = true;
    return ldlt_.info() == Eigen::Success;
  }

  VectorXd solve_schur(const VectorXd& r) const {
    VectorXd x = use_ldlt_ ? VectorXd(ldlt_.solve(r)) : VectorXd(llt_.solve(r));
    return x;
  }

  Comp affine_comp(const Scaling& sc) const {
    Comp c;
    c.orth = -sc.lam.cwiseProduct(sc.lam);
    for (const auto& b : sc.blocks)
      c.blocks.push_back(MatrixXd(VectorXd(-b.lam.cwiseProduct(b.lam)).asDiagonal()));
    return c;
  }

  Comp center_comp(const Scaling& sc, double smu, const Scaled& dxa,
                   const Scaled& dsa) const {
    Comp c;
    c.orth = VectorXd::Constant(sc.nonneg, smu) - sc.lam.cwiseProduct(sc.lam) -
             dxa.orth.cwiseProduct(dsa.orth);
    for (std::size_t k = 0; k < sc.blocks.size(); ++k) {
      const auto& b = sc.blocks[k];
      MatrixXd prod = dxa.blocks[k] * dsa.blocks[k];
      MatrixXd R = MatrixXd::Identity(b.side, b.side) * smu;
      R.diagonal() -= b.lam.cwiseProduct(b.lam);
      R -= 0.5 * (prod + prod.transpose());
      c.blocks.push_back(std::move(R));
    }
    return c;
  }

  // ds = r_z - H dx, where r_z solves Lambda o (dx~ + ds~) = R.
  VectorXd rz_from(const Scaling& sc, const Comp& comp) const {
    VectorXd rz(k_.dim());
    for (std::size_t i = 0; i < sc.nonneg; ++i) rz(i) = comp.orth(i) / sc.lam(i) / sc.w(i);
    for (std::size_t k = 0; k < sc.blocks.size(); ++k) {
      const auto& b = sc.blocks[k];
      MatrixXd Z(b.side, b.side);
      for (std::size_t i = 0; i < b.side; ++i)
        for (std::size_t j = 0; j < b.side; ++j)
          Z(i, j) = 2.0 * comp.blocks[k](i, j) / (b.lam(i) + b.lam(j));
      MatrixXd S = b.Ginv.transpose() * Z * b.Ginv;
      rz.segment(b.offset, svec_size(b.side)) = svec(S);
    }
    return rz;
  }

  Direction direction(const Scaling& sc, const Iterate& it, const VectorXd& rp,
                      const VectorXd& rd, double rg, double eta, const Comp& comp,
                      double rtau, const VectorXd& q, const VectorXd& wv,
                      double denom_base) const {
    const VectorXd rz = rz_from(sc, comp);
    const VectorXd htmp = apply_hinv(sc, rz - eta * rd);
    const VectorXd p = solve_schur(eta * rp - A_ * htmp);
    const VectorXd u = apply_hinv(sc, A_.transpose() * p) + htmp;
    Direction d;
    const double denom = denom_base + it.kappa / it.tau;
    d.dtau = (eta * rg + c_.dot(u) - b_.dot(p) + rtau / it.tau) / denom;
    d.dy = p + q * d.dtau;
    d.dx = u + wv * d.dtau;
    for (int pass = 0; pass < 2; ++pass) {
      const VectorXd e = eta * rp - (A_ * d.dx - b_ * d.dtau);
      const VectorXd corr = solve_schur(e);
      d.dy += corr;
      d.dx += apply_hinv(sc, A_.transpose() * corr);
    }
    // From the dual equation; numerically steadier than rz - H dx once the
    // scaling becomes ill-conditioned.
    d.ds = eta * rd - A_.transpose() * d.dy + c_ * d.dtau;
    d.dkappa = (rtau - it.kappa * d.dtau) / it.tau;
    return d;
  }

  double step_to_boundary(const Scaling& sc, const Iterate& it, const Direction& d) const {
    double a = std::min(max_step(sc, scale_x(sc, d.dx)), max_step(sc, scale_s(sc, d.ds)));
    if (d.dtau < 0) a = std::min(a, -it.tau / d.dtau);
    if (d.dkappa < 0) a = std::min(a, -it.kappa / d.dkappa);
    return a;
  }

  const MatrixXd& A_;
  const VectorXd& b_;
  const VectorXd& c_;
  const ConeStructure& k_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

}  // namespace

ConicSolution solve(const ConicProgram& p, const Tolerances& tol) {
  p.check();
  ConicSolution sol;
  Presolved pre = presolve(p);
  sol.removed_rows = pre.removed;
  const std::size_t n = p.num_vars();
  if (pre.inconsistent) {
    sol.status = Status::infeasible;
    sol.x = VectorXd::Zero(n);
    sol.s = VectorXd::Zero(n);
    sol.y = VectorXd::Zero(p.num_rows());
    return sol;
  }

  HsdSolver hsd(pre.A, pre.b, p.c, p.cones);
  Iterate it;
  int iters = 0;
  Status st = hsd.run(tol, it, iters);
  sol.iterations = iters;

  VectorXd yk;
  if (st == Status::infeasible || st == Status::unbounded) {
    // Report the certificate direction unnormalized by tau.
    sol.x = it.x;
    sol.s = it.s;
    yk = it.y;
  } else {
    sol.x = it.x / it.tau;
    sol.s = it.s / it.tau;
    yk = it.y / it.tau;
  }
  sol.y = VectorXd::Zero(p.num_rows());
  for (std::size_t i = 0; i < pre.kept.size(); ++i)
    sol.y(pre.kept[i]) = yk(i) * pre.row_scale(i);

  sol.primal_objective = p.c.dot(sol.x);
  sol.dual_objective = p.b.dot(sol.y);
  sol.residuals = kkt_residuals(p, sol.x, sol.y, sol.s);
  sol.min_cone_x = cone_min(p.cones, sol.x);
  sol.min_cone_s = cone_min(p.cones, sol.s);
  if (st == Status::numerical_limit && sol.residuals.primal <= 1e-7 &&
      sol.residuals.dual <= 1e-7 && sol.residuals.gap <= 1e-7)
    st = Status::optimal;  // stalled inside the contract tolerance
  if (st == Status::optimal && sol.residuals.max() > 1e-7) st = Status::numerical_limit;
  sol.status = st;
  return sol;
}

ConicSolution solve_lp(const ConicProgram& p, const Tolerances& tol) {
  if (!p.cones.psd.empty()) throw InvalidArgument("solve_lp: program has PSD blocks");
  return solve(p, tol);
}

}  // namespace concbound::sdp
