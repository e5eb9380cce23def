// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "concbound/closed_forms.hpp"

namespace concbound::variational {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kThetaLo = -std::numbers::pi / 4.0;
constexpr double kThetaHi = std::numbers::pi / 2.0;

}  // namespace

std::size_t ExtremalPointSet::n() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
}

std::vector<double> ExtremalPointSet::point(std::size_t v) const {
  const BlockVertex& bv = vertices.at(v);
  std::vector<double> x(n(), 0.0);
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    std::vector<double> vals;
    vals.insert(vals.end(), bv.zeros[b], 0.0);
    if (bv.frac_block == static_cast<int>(b)) vals.push_back(bv.frac);
    vals.insert(vals.end(), bv.ones[b], 1.0);
    for (std::size_t k = 0; k < vals.size(); ++k) x[members[b][k]] = vals[k];
  }
  return x;
}

std::vector<std::vector<double>> ExtremalPointSet::points() const {
  std::vector<std::vector<double>> out;
  for (std::size_t v = 0; v < size(); ++v) out.push_back(point(v));
  return out;
}

double snap_threshold(double s, std::size_t n) {
  const double r = std::round(s);
  return std::abs(s - r) <= 1e-12 * std::max(1.0, double(n)) ? r : s;
}

ExtremalPointSet enumerate_extremal(std::vector<std::size_t> block_sizes, double s) {
  ExtremalPointSet out;
  out.block_sizes = block_sizes;
  const std::size_t B = block_sizes.size();
  std::size_t n = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (block_sizes[b] == 0) throw InvalidArgument("empty block");
    std::vector<std::size_t> mem(block_sizes[b]);
    std::iota(mem.begin(), mem.end(), n);
    out.members.push_back(std::move(mem));
    n += block_sizes[b];
  }
  if (!std::isfinite(s)) throw InvalidArgument("threshold must be finite");
  s = snap_threshold(s, n);
  out.threshold = s;
  if (s > double(n)) throw EmptyTail("threshold exceeds n: the tail set is empty");

  std::vector<std::size_t> ones(B, 0);
  // Cube vertices with at least s ones.
  auto rec_cube = [&](auto&& self, std::size_t b, std::size_t total) -> void {
    if (b == B) {
      if (double(total) >= s) {
        BlockVertex v;
        v.ones = ones;
        for (std::size_t k = 0; k < B; ++k) v.zeros.push_back(block_sizes[k] - ones[k]);
        out.vertices.push_back(std::move(v));
      }
      return;
    }
    for (std::size_t o = 0; o <= block_sizes[b]; ++o) {
      ones[b] = o;
      self(self, b + 1, total + o);
    }
  };
  rec_cube(rec_cube, 0, 0);

  // One fractional coordinate f = s - floor(s) on the hyperplane.
  const double fl = std::floor(s);
  const double f = s - fl;
  if (s > 0.0 && f > 0.0) {
    const auto want = static_cast<std::size_t>(fl);
    for (std::size_t fb = 0; fb < B; ++fb) {
      auto rec = [&](auto&& self, std::size_t b, std::size_t total) -> void {
        if (b == B) {
          if (total != want) return;
          BlockVertex v;
          v.ones = ones;
          v.frac_block = static_cast<int>(fb);
          v.frac = f;
          for (std::size_t k = 0; k < B; ++k)
            v.zeros.push_back(block_sizes[k] - ones[k] - (k == fb ? 1 : 0));
          out.vertices.push_back(std::move(v));
          return;
        }
        const std::size_t cap = block_sizes[b] - (b == fb ? 1 : 0);
        for (std::size_t o = 0; o <= cap && total + o <= want; ++o) {
          ones[b] = o;
          self(self, b + 1, total + o);
        }
      };
      rec(rec, 0, 0);
    }
  }

  // Deterministic order: lexicographic on expanded coordinates.
  std::vector<std::pair<std::vector<double>, BlockVertex>> keyed;
  for (std::size_t v = 0; v < out.vertices.size(); ++v)
    keyed.emplace_back(out.point(v), out.vertices[v]);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  out.vertices.clear();
  for (auto& kv : keyed) out.vertices.push_back(std::move(kv.second));
  return out;
}

ExtremalPointSet enumerate_extremal_iid(std::size_t n, double s) {
  if (n == 0) throw InvalidArgument("n must be positive");
  return enumerate_extremal({n}, s);
}

ExtremalPointSet enumerate_extremal_two_block(std::size_t n, std::size_t m, double mu1,
                                              double mu2, double t) {
  if (n == 0 || m > n) throw InvalidArgument("two-block enumeration needs 0 < m <= n");
  if (!(mu1 > 0 && mu1 < 1 && mu2 > 0 && mu2 < 1)) throw DomainError("means must lie in (0,1)");
  const double s = double(n) * t + double(m) * mu1 + double(n - m) * mu2;
  if (m == 0 || m == n) return enumerate_extremal({n}, s);
  return enumerate_extremal({m, n - m}, s);
}

// ---------------------------------------------------------------------------

double AffineWitness::log_product(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = alpha.at(i) + beta.at(i) * x[i];
    if (!(v > 0.0)) return -kInf;
    s += std::log(v);
  }
  return s;
}

double AffineWitness::value(std::span<const double> means) const {
  double p = 1.0;
  for (std::size_t i = 0; i < means.size(); ++i) p *= alpha.at(i) + beta.at(i) * means[i];
  return p;
}

namespace {

// Terms of sum_b [count * log(alpha_b + beta_b * v)] for one vertex.
struct Term {
  std::size_t block;
  double v;
  double count;
};

struct Program {
  std::size_t B = 0;
  std::vector<double> m, mu;
  std::vector<std::vector<Term>> rows;

  explicit Program(const ExtremalPointSet& pts, std::span<const double> means) {
    B = pts.block_sizes.size();
    for (std::size_t b = 0; b < B; ++b) {
      m.push_back(double(pts.block_sizes[b]));
      mu.push_back(means[b]);
    }
    for (const auto& bv : pts.vertices) {
      std::vector<Term> row;
      for (std::size_t b = 0; b < B; ++b) {
        if (bv.zeros[b]) row.push_back({b, 0.0, double(bv.zeros[b])});
        if (bv.ones[b]) row.push_back({b, 1.0, double(bv.ones[b])});
      }
      if (bv.frac_block >= 0) row.push_back({std::size_t(bv.frac_block), bv.frac, 1.0});
      rows.push_back(std::move(row));
    }
  }

  // min over vertices of sum log(alpha + beta x); -inf if any factor <= 0.
  double min_log(std::span<const double> a, std::span<const double> b) const {
    double best = kInf;
    for (const auto& row : rows) {
      double s = 0.0;
      for (const Term& t : row) {
        const double v = a[t.block] + b[t.block] * t.v;
        if (!(v > 0.0)) return -kInf;
        s += t.count * std::log(v);
      }
      best = std::min(best, s);
    }
    return best;
  }

  // log of the scale-invariant objective; +inf outside the domain.
  double log_objective(std::span<const double> a, std::span<const double> b) const {
    double num = 0.0;
    for (std::size_t k = 0; k < B; ++k) {
      if (a[k] < 0.0 || a[k] + b[k] < 0.0) return kInf;
      const double v = a[k] + b[k] * mu[k];
      if (!(v > 0.0)) return kInf;
      num += m[k] * std::log(v);
    }
    const double den = min_log(a, b);
    if (!std::isfinite(den)) return kInf;
    return num - den;
  }

  double log_objective_theta(std::span<const double> th) const {
    std::vector<double> a(B), b(B);
    for (std::size_t k = 0; k < B; ++k) {
      if (th[k] < kThetaLo || th[k] > kThetaHi) return kInf;
      a[k] = std::max(std::cos(th[k]), 0.0);
      b[k] = std::sin(th[k]);
    }
    return log_objective(a, b);
  }

  double linear_objective(const VectorXd& z) const {
    double f = 0.0;
    for (std::size_t k = 0; k < B; ++k) f += m[k] * (z(k) + z(B + k) * mu[k] - 1.0);
    return f;
  }

  // Barrier value, gradient and Hessian at z; false outside the domain.
  bool barrier(const VectorXd& z, double tau, double& phi, VectorXd* g, MatrixXd* H) const {
    const std::size_t d = 2 * B;
    phi = tau * linear_objective(z);
    if (g) {
      g->setZero(d);
      for (std::size_t k = 0; k < B; ++k) {
        (*g)(k) += tau * m[k];
        (*g)(B + k) += tau * m[k] * mu[k];
      }
    }
    if (H) H->setZero(d, d);
    for (std::size_t k = 0; k < B; ++k) {
      const double a = z(k), ab = z(k) + z(B + k);
      if (!(a > 0.0) || !(ab > 0.0)) return false;
      phi -= std::log(a) + std::log(ab);
      if (g) {
        (*g)(k) -= 1.0 / a + 1.0 / ab;
        (*g)(B + k) -= 1.0 / ab;
      }
      if (H) {
        (*H)(k, k) += 1.0 / (a * a) + 1.0 / (ab * ab);
        (*H)(k, B + k) += 1.0 / (ab * ab);
        (*H)(B + k, k) += 1.0 / (ab * ab);
        (*H)(B + k, B + k) += 1.0 / (ab * ab);
      }
    }
    VectorXd gc(d);
    MatrixXd Hc(d, d);
    for (const auto& row : rows) {
      double c = 0.0;
      gc.setZero();
      Hc.setZero();
      for (const Term& t : row) {
        const double v = z(t.block) + z(B + t.block) * t.v;
        if (!(v > 0.0)) return false;
        c += t.count * std::log(v);
        const std::size_t ia = t.block, ib = B + t.block;
        gc(ia) += t.count / v;
        gc(ib) += t.count * t.v / v;
        const double w = t.count / (v * v);
        Hc(ia, ia) -= w;
        Hc(ia, ib) -= w * t.v;
        Hc(ib, ia) -= w * t.v;
        Hc(ib, ib) -= w * t.v * t.v;
      }
      if (!(c > 0.0)) return false;
      phi -= std::log(c);
      if (g) *g -= gc / c;
      if (H) *H += gc * gc.transpose() / (c * c) - Hc / c;
    }
    return true;
  }

  std::size_t num_constraints() const { return rows.size() + 2 * B; }
};

struct BarrierResult {
  VectorXd z;
  int newton_steps = 0;
  int outer_steps = 0;
  double gap = 0.0;
};

BarrierResult solve_barrier(const Program& P) {
  const std::size_t B = P.B, d = 2 * B;
  VectorXd z(d);
  z.head(B).setConstant(2.0);
  z.tail(B).setZero();
  double tau = 1.0;
  const double mc = double(P.num_constraints());
  BarrierResult res;
  for (int outer = 0; outer < 200; ++outer) {
    for (int it = 0; it < 100; ++it) {
      double phi;
      VectorXd g;
      MatrixXd H;
      if (!P.barrier(z, tau, phi, &g, &H))
        throw SolverFailure("barrier iterate left the domain", "numerical_limit");
      Eigen::LDLT<MatrixXd> ldlt(H);
      VectorXd dz = -ldlt.solve(g);
      if (!dz.allFinite()) {
        dz = -H.completeOrthogonalDecomposition().solve(g);
        if (!dz.allFinite()) throw SolverFailure("singular barrier Hessian", "numerical_limit");
      }
      const double lam2 = -g.dot(dz);
      ++res.newton_steps;
      if (lam2 / 2.0 <= 1e-12) break;
      double step = 1.0, phin;
      while (step > 1e-16) {
        VectorXd zn = z + step * dz;
        if (P.barrier(zn, tau, phin, nullptr, nullptr) && phin <= phi - 0.25 * step * lam2) {
          z = zn;
          break;
        }
        step *= 0.5;
      }
      if (step <= 1e-16) break;
    }
    res.outer_steps = outer + 1;
    res.gap = mc / tau;
    if (res.gap <= 1e-10) break;
    tau /= 0.2;
  }
  res.z = z;
  return res;
}

// Golden-section minimization of f on [a, b].
template <class F>
std::pair<double, double> golden(F&& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Nelder-Mead on theta in R^B.
template <class F>
std::pair<std::vector<double>, double> nelder_mead(F&& f, std::vector<double> x0, double step,
                                                   int max_evals) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> s(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) {
    s[i + 1][i] += step;
    if (!std::isfinite(f(s[i + 1]))) s[i + 1][i] -= 2.0 * step;
  }
  int evals = 0;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(s[i]), ++evals;
  while (evals < max_evals) {
    std::vector<std::size_t> idx(d + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[d - 1];
    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k) diam = std::max(diam, std::abs(s[i][k] - s[best][k]));
    if (diam < 1e-12) break;
    std::vector<double> cen(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) cen[k] += s[i][k] / double(d);
    auto along = [&](double c) {
      std::vector<double> p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = cen[k] + c * (s[worst][k] - cen[k]);
      return p;
    };
    auto xr = along(-1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[best]) {
      auto xe = along(-2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) s[worst] = xe, fv[worst] = fe;
      else s[worst] = xr, fv[worst] = fr;
    } else if (fr < fv[second]) {
      s[worst] = xr, fv[worst] = fr;
    } else {
      auto xc = along(fr < fv[worst] ? -0.5 : 0.5);
      const double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fv[worst])) {
        s[worst] = xc, fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < d; ++k) s[i][k] = s[best][k] + 0.5 * (s[i][k] - s[best][k]);
          fv[i] = f(s[i]);
          ++evals;
        }
      }
    }
  }
  const std::size_t b =
      std::min_element(fv.begin(), fv.end()) - fv.begin();
  return {s[b], fv[b]};
}

}  // namespace

double product_objective(const ExtremalPointSet& pts, std::span<const double> means,
                         std::span<const double> alpha, std::span<const double> beta) {
  Program P(pts, means);
  return std::exp(P.log_objective(alpha, beta));
}

std::pair<BoundResult, AffineWitness> solve_variational(const MomentSpec& spec, double t) {
  const auto start = std::chrono::steady_clock::now();
  spec.check_structure();
  if (spec.order() != 1) throw InvalidArgument("variational bound takes first moments only");
  if (spec.support.lower != 0.0 || spec.support.upper != 1.0)
    throw InvalidArgument("variational bound expects the support [0,1]");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("deviation t must be >= 0");
  for (std::size_t i = 0; i < spec.n(); ++i)
    if (!(spec.mean(i) > 0.0 && spec.mean(i) < 1.0)) throw DomainError("means must lie in (0,1)");
  const std::size_t n = spec.n();
  const auto blocks = spec.block_partition();
  if (blocks.size() > 2 && n > 8)
    throw InvalidArgument("more than two distinct means is supported only for n <= 8");

  AffineWitness w;
  BoundResult r = BoundResult::make("variational", 1.0);
  if (t == 0.0) {
    w.alpha.assign(n, 1.0);
    w.beta.assign(n, 0.0);
    w.scale_note = "trivial: t = 0";
    return {r, w};
  }

  std::vector<std::size_t> sizes;
  std::vector<double> bmeans;
  for (const auto& b : blocks) {
    sizes.push_back(b.size());
    bmeans.push_back(spec.mean(b.front()));
  }
  ExtremalPointSet pts;
  try {
    pts = enumerate_extremal(sizes, tail_threshold(spec, t));
  } catch (const EmptyTail&) {
    w.alpha.assign(n, 0.0);
    w.beta.assign(n, 0.0);
    w.scale_note = "empty tail";
    r.value = 0.0;
    r.diagnostics.status = "empty_tail";
    return {r, w};
  }
  pts.members = blocks;

  const Program P(pts, bmeans);
  const std::size_t B = P.B;
  const BarrierResult br = solve_barrier(P);
  const double conv = P.linear_objective(br.z);
  std::vector<double> a(B), b(B), th(B);
  for (std::size_t k = 0; k < B; ++k) {
    a[k] = br.z(k);
    b[k] = br.z(B + k);
    th[k] = std::atan2(b[k], a[k]);
  }
  const double lp_barrier = P.log_objective(a, b);

  // Polish on the angle parametrization.
  auto f = [&](std::span<const double> x) { return P.log_objective_theta(x); };
  std::vector<double> best_th = th;
  double best = f(th);
  if (B == 1) {
    const int grid = 4000;
    int kbest = 0;
    double fbest = kInf;
    for (int k = 0; k <= grid; ++k) {
      const double x = kThetaLo + (kThetaHi - kThetaLo) * k / grid;
      const double v = f(std::span<const double>(&x, 1));
      if (v < fbest) fbest = v, kbest = k;
    }
    const double h = (kThetaHi - kThetaLo) / grid;
    const double lo = std::max(kThetaLo, kThetaLo + h * (kbest - 1));
    const double hi = std::min(kThetaHi, kThetaLo + h * (kbest + 1));
    auto g1 = [&](double x) { return f(std::span<const double>(&x, 1)); };
    auto [xm, fm] = golden(g1, lo, hi, 1e-14);
    for (double cand : {xm, lo, hi, kThetaLo + h * kbest}) {
      const double v = g1(cand);
      if (v < best) best = v, best_th = {cand};
    }
  } else {
    auto fv = [&](const std::vector<double>& x) { return f(x); };
    auto start_th = th;
    for (int round = 0; round < 3; ++round) {
      auto [x, v] = nelder_mead(fv, start_th, round == 0 ? 0.05 : 0.005, 20000);
      if (v < best) best = v, best_th = x;
      start_th = best_th;
    }
  }

  double logv = lp_barrier;
  for (std::size_t k = 0; k < B; ++k) {
    if (best <= lp_barrier) {
      a[k] = std::max(std::cos(best_th[k]), 0.0);
      b[k] = std::sin(best_th[k]);
    }
  }
  logv = std::min(best, lp_barrier);
  if (!std::isfinite(logv)) throw SolverFailure("variational polish failed", "numerical_limit");

  // Normalize so the binding vertex has product exactly one.
  const double cmin = P.min_log(a, b);
  const double scale = std::exp(-cmin / double(n));
  w.alpha.assign(n, 0.0);
  w.beta.assign(n, 0.0);
  for (std::size_t k = 0; k < B; ++k)
    for (std::size_t i : blocks[k]) {
      w.alpha[i] = a[k] * scale;
      w.beta[i] = b[k] * scale;
    }
  w.scale_note = "scaled by exp(-min_vertex_log_product / n) so the binding vertex product is 1";

  r.value = std::exp(logv);
  r.diagnostics.iterations = br.newton_steps;
  r.diagnostics.gap = br.gap;
  r.diagnostics.set("convex_objective", conv);
  r.diagnostics.set("exp_convex_objective", std::exp(conv));
  r.diagnostics.set("barrier_product_value", std::exp(lp_barrier));
  r.diagnostics.set("extremal_points", double(pts.size()));
  r.diagnostics.set("outer_steps", br.outer_steps);
  r.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {r, w};
}

ClosedFormN2 closed_form_n2(double mu, double t) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mean must lie in (0,1)");
  if (!(t >= 0.0) || t > 1.0 - mu) throw DomainError("closed form needs 0 <= t <= 1 - mu");
  const double nu = mu + t;
  ClosedFormN2 c;
  if (t <= 0.5 - mu) {
    c.regime = 1;
    c.alpha = std::sqrt(mu / (mu + 2.0 * t));
    c.beta = t / ((mu + t) * std::sqrt(mu * (mu + 2.0 * t)));
    c.printed_alpha = std::sqrt(mu / (mu + t));
    c.printed_beta = c.beta;
  } else if (t <= (1.0 - mu) * (1.0 - mu) / (2.0 - mu)) {
    c.regime = 2;
    const double q = std::sqrt((1.0 - mu) * (1.0 - mu - 2.0 * t));
    c.alpha = std::sqrt((1.0 - 2.0 * t - mu) / (1.0 - mu)) -
              t * (2.0 * nu - 1.0) / (q * (1.0 - nu));
    c.beta = t / ((1.0 - nu) * q);
    c.printed_alpha = c.alpha;
    c.printed_beta = c.beta;
  } else {
    c.regime = 3;
    c.alpha = 0.0;
    c.beta = 1.0 / std::sqrt(2.0 * nu - 1.0);
    c.printed_alpha = 0.0;
    c.printed_beta = mu / std::sqrt(2.0 * nu - 1.0);
  }
  const ExtremalPointSet pts = enumerate_extremal_iid(2, 2.0 * nu);
  const double m[1] = {mu};
  const double a[1] = {c.alpha}, b[1] = {c.beta};
  const double pa[1] = {c.printed_alpha}, pb[1] = {c.printed_beta};
  c.value = product_objective(pts, m, a, b);
  c.printed_value = product_objective(pts, m, pa, pb);
  return c;
}

double variational_gap_to_chernoff(std::size_t n, double mu, double t) {
  if (n == 0) throw InvalidArgument("n must be positive");
  const double rv = solve_variational(MomentSpec::iid(n, SupportInterval::unit(), {mu}), t)
                        .first.value;
  const double r1 = closed_form::chernoff_univariate(mu, t).first.value;
  if (rv == 0.0 || r1 == 0.0) return 0.0;
  return std::abs(std::log(rv) - double(n) * std::log(r1)) / double(n);
}

}  // namespace concbound::variational
