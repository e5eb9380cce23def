// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "concbound/sdp.hpp"
#include "parallel.hpp"

namespace concbound::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kTailTol = 1e-11;

struct UniLp {
  sdp::Status status = sdp::Status::numerical_limit;
  double value = 0.0;
  std::vector<double> p;
};

// max sum_j p_j f_j  s.t.  sum_j p_j x_j^k = m_k (k = 0..a, m_0 = 1), p >= 0.
UniLp univariate_lp(std::span<const double> pts, std::span<const double> f,
                    std::span<const double> moments) {
  const std::size_t g = pts.size(), a = moments.size();
  sdp::ConicProgram lp;
  lp.cones.nonneg = g;
  lp.c = VectorXd(g);
  lp.A = MatrixXd(a + 1, g);
  lp.b = VectorXd(a + 1);
  for (std::size_t j = 0; j < g; ++j) {
    lp.c(j) = -f[j];
    double xk = 1.0;
    for (std::size_t k = 0; k <= a; ++k) {
      lp.A(k, j) = xk;
      xk *= pts[j];
    }
  }
  lp.b(0) = 1.0;
  for (std::size_t k = 1; k <= a; ++k) lp.b(k) = moments[k - 1];
  const sdp::ConicSolution sol = sdp::solve_lp(lp, {1e-10, 1e-10, 300});
  UniLp out;
  out.status = sol.status;
  if (sol.status == sdp::Status::optimal) {
    out.value = -sol.primal_objective;
    out.p.assign(sol.x.data(), sol.x.data() + sol.x.size());
    for (double& v : out.p) v = std::max(v, 0.0);
  }
  return out;
}

// Carathéodory reduction to at most a+1 atoms without lowering sum p f,
// followed by an exact refit of the weights on the final support.
DiscreteDistribution purify(std::span<const double> pts, std::vector<double> p,
                            std::span<const double> f, std::span<const double> moments) {
  const std::size_t a = moments.size();
  std::vector<std::size_t> S;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] > 1e-14) S.push_back(j);

  auto moment_matrix = [&](const std::vector<std::size_t>& idx) {
    MatrixXd V(a + 1, idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
      double xk = 1.0;
      for (std::size_t k = 0; k <= a; ++k) {
        V(k, c) = xk;
        xk *= pts[idx[c]];
      }
    }
    return V;
  };

  while (S.size() > a + 1) {
    MatrixXd V = moment_matrix(S);
    Eigen::FullPivLU<MatrixXd> lu(V);
    VectorXd z = lu.kernel().col(0);
    double df = 0.0;
    for (std::size_t c = 0; c < S.size(); ++c) df += z(c) * f[S[c]];
    if (df < 0) z = -z;
    // Row 0 forces sum z = 0, so z has a negative entry unless it vanishes.
    double theta = kInf;
    std::size_t hit = S.size();
    for (std::size_t c = 0; c < S.size(); ++c)
      if (z(c) < -1e-15 && p[S[c]] / -z(c) < theta) {
        theta = p[S[c]] / -z(c);
        hit = c;
      }
    if (hit == S.size()) break;
    for (std::size_t c = 0; c < S.size(); ++c) p[S[c]] += theta * z(c);
    p[S[hit]] = 0.0;
    std::vector<std::size_t> next;
    for (std::size_t c = 0; c < S.size(); ++c)
      if (p[S[c]] > 1e-15) next.push_back(S[c]);
    S.swap(next);
  }

  VectorXd m(a + 1);
  m(0) = 1.0;
  for (std::size_t k = 1; k <= a; ++k) m(k) = moments[k - 1];
  MatrixXd V = moment_matrix(S);
  VectorXd cur(S.size());
  for (std::size_t c = 0; c < S.size(); ++c) cur(c) = p[S[c]];
  VectorXd fit = V.colPivHouseholderQr().solve(m);
  if (fit.minCoeff() >= 0.0 && (V * fit - m).norm() < (V * cur - m).norm()) cur = fit;

  DiscreteDistribution d;
  for (std::size_t c = 0; c < S.size(); ++c) d.atoms.push_back({pts[S[c]], cur(c)});
  return d.simplified();
}

std::vector<double> uniform_grid(std::size_t g) {
  std::vector<double> x(g);
  for (std::size_t j = 0; j < g; ++j) x[j] = double(j) / double(g - 1);
  x.back() = 1.0;
  return x;
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

bool moments_feasible_lp(const SupportInterval& support, std::span<const double> moments,
                         std::size_t grid_points) {
  if (!support.bounded()) throw UnboundedSupport("LP oracle needs a bounded support");
  if (grid_points < 2) throw InvalidArgument("grid needs at least 2 points");
  AffineMap map{support.lower, support.width()};
  const auto m = map.moments_to_unit(moments);
  const auto pts = uniform_grid(grid_points);
  std::vector<double> zero(grid_points, 0.0);
  const UniLp r = univariate_lp(pts, zero, m);
  return r.status == sdp::Status::optimal;
}

BoundResult lp_tail_oracle(const MomentSpec& spec, double t, std::size_t grid_points) {
  const auto start = std::chrono::steady_clock::now();
  spec.check_structure();
  if (grid_points < 101) throw InvalidArgument("LP oracle needs at least 101 grid points");
  if (!(t >= 0.0)) throw DomainError("deviation t must be >= 0");
  if (!spec.support.bounded()) throw UnboundedSupport("LP oracle needs a bounded support");
  const AffineMap map{spec.support.lower, spec.support.width()};
  const auto m = map.moments_to_unit(spec.moments.at(0));
  const double nu = map.to_unit(spec.mean(0) + t);
  const auto pts = uniform_grid(grid_points);
  std::vector<double> f(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) f[j] = pts[j] >= nu - 1e-10 ? 1.0 : 0.0;
  const UniLp r = univariate_lp(pts, f, m);
  if (r.status == sdp::Status::infeasible)
    throw MomentInfeasible("no grid distribution matches the moments (LP infeasible)");
  if (r.status != sdp::Status::optimal)
    throw SolverFailure("LP oracle did not converge", sdp::to_string(r.status));
  BoundResult res = BoundResult::make("lp-oracle", std::clamp(r.value, 0.0, 1.0));
  res.diagnostics.set("grid_step", 1.0 / double(grid_points - 1));
  res.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

double tail_probability(const ProductDistribution& d, double threshold, double tol) {
  double p = 0.0;
  d.for_each_outcome([&](std::span<const double> x, double w) {
    double s = 0.0;
    for (double v : x) s += v;
    if (s >= threshold - tol) p += w;
  });
  return p;
}

ProductSearchResult product_search_oracle(const MomentSpec& spec, double t,
                                          const ProductSearchOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  spec.check_structure();
  const std::size_t n = spec.n();
  if (n > 4) throw InvalidArgument("product search oracle supports n <= 4");
  if (!spec.support.bounded()) throw UnboundedSupport("product search needs a bounded support");
  if (!(t >= 0.0)) throw DomainError("deviation t must be >= 0");
  validate_moments_or_throw(spec);
  const std::size_t a = spec.order();
  if (opts.atoms_per_var < a + 1 || opts.atoms_per_var > 3)
    throw InvalidArgument("atoms_per_var must lie in [a+1, 3]");
  if (opts.grid_points < 3) throw InvalidArgument("grid needs at least 3 points");

  const NormalizedSpec ns = normalize_support(spec);
  const double w = spec.support.width(), lo = spec.support.lower;
  const double thr = (tail_threshold(spec, t) - double(n) * lo) / w;
  const auto grid = uniform_grid(opts.grid_points);
  const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);

  struct Run {
    double value = -1.0;
    std::vector<DiscreteDistribution> factors;
    int sweeps = 0;
  };
  std::vector<Run> runs(restarts);

  detail::parallel_for(
      restarts,
      [&](std::size_t rs) {
        std::mt19937_64 rng(splitmix64(opts.seed ^ (0x51ed270b27dd6d2dULL * (rs + 1))));
        Run run;
        // Random feasible start: LP vertex for a random objective.
        for (std::size_t i = 0; i < n; ++i) {
          const auto& m = ns.spec.moments[i];
          std::vector<double> pts = grid;
          pts.push_back(m[0]);
          std::vector<double> f(pts.size());
          for (double& v : f) v = uniform01(rng);
          UniLp lp = univariate_lp(pts, f, m);
          if (lp.status != sdp::Status::optimal)
            throw MomentInfeasible("product search: no feasible start for variable " +
                                   std::to_string(i));
          run.factors.push_back(purify(pts, lp.p, f, m));
        }
        ProductDistribution cur{run.factors};
        run.value = tail_probability(cur, thr, kTailTol);
        for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
          bool improved = false;
          for (std::size_t i = 0; i < n; ++i) {
            // Distribution of the sum of the other coordinates.
            ProductDistribution rest;
            for (std::size_t j = 0; j < n; ++j)
              if (j != i) rest.factors.push_back(cur.factors[j]);
            std::vector<std::pair<double, double>> others;
            if (rest.factors.empty()) {
              others.push_back({0.0, 1.0});
            } else {
              rest.for_each_outcome([&](std::span<const double> x, double p) {
                double s = 0.0;
                for (double v : x) s += v;
                others.push_back({s, p});
              });
            }
            const auto& m = ns.spec.moments[i];
            std::vector<double> pts = grid;
            pts.push_back(m[0]);
            for (const auto& [s, p] : others) {
              const double c = thr - s;
              if (c > 0.0 && c < 1.0) pts.push_back(c);
            }
            for (const auto& at : cur.factors[i].atoms) pts.push_back(at.location);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            std::vector<double> f(pts.size(), 0.0);
            for (std::size_t j = 0; j < pts.size(); ++j)
              for (const auto& [s, p] : others)
                if (pts[j] + s >= thr - kTailTol) f[j] += p;
            UniLp lp = univariate_lp(pts, f, m);
            if (lp.status != sdp::Status::optimal) continue;
            ProductDistribution trial = cur;
            trial.factors[i] = purify(pts, lp.p, f, m);
            if (trial.factors[i].atoms.size() > opts.atoms_per_var) continue;
            if (trial.factors[i].moment_error(m) > 1e-9) continue;
            const double v = tail_probability(trial, thr, kTailTol);
            if (v > run.value + 1e-13) {
              run.value = v;
              cur = std::move(trial);
              improved = true;
            }
          }
          run.sweeps = sweep + 1;
          if (!improved) break;
        }
        run.factors = cur.factors;
        runs[rs] = std::move(run);
      },
      opts.threads);

  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r)
    if (runs[r].value > runs[best].value) best = r;

  ProductSearchResult out;
  out.result = BoundResult::make("product-oracle", thr > double(n) + 1e-12 ? 0.0 : runs[best].value);
  for (const auto& fct : runs[best].factors) {
    DiscreteDistribution d;
    for (const auto& at : fct.atoms) d.atoms.push_back({lo + w * at.location, at.weight});
    out.witness.factors.push_back(std::move(d));
  }
  out.result.diagnostics.iterations = runs[best].sweeps;
  out.result.diagnostics.set("best_restart", double(best));
  out.result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------

IndicatorTail indicator_tail(const MomentSpec& spec, double t) {
  return IndicatorTail{tail_threshold(spec, t)};
}

double evaluate(const Functional& f, std::span<const double> x) {
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, IndicatorTail>) {
          double s = 0.0;
          for (double v : x) s += v;
          return s >= fn.threshold ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, ProductAffine>) {
          double p = 1.0;
          for (std::size_t i = 0; i < x.size(); ++i) p *= fn.alpha.at(i) + fn.beta.at(i) * x[i];
          return p;
        } else {
          double s = 0.0;
          for (double v : x) s += v;
          return std::exp(fn.lambda * (s - fn.center));
        }
      },
      f);
}

double exact_expectation(const ProductDistribution& d, const Functional& f) {
  return d.expectation([&](std::span<const double> x) { return evaluate(f, x); });
}

McEstimate monte_carlo_expectation(const ProductDistribution& d, const Functional& f,
                                   std::size_t samples, std::uint64_t seed,
                                   unsigned threads) {
  if (samples < 10000) throw InvalidArgument("monte carlo needs at least 10^4 samples");
  const std::size_t n = d.n();
  std::vector<std::vector<double>> cum(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& at : d.factors[i].atoms) cum[i].push_back(s += at.weight);
    if (cum[i].empty()) throw InvalidArgument("factor without atoms");
  }

  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  struct Acc {
    double count = 0.0, mean = 0.0, m2 = 0.0;
  };
  std::vector<Acc> acc(chunks);

  detail::parallel_for(
      chunks,
      [&](std::size_t c) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c)));
        const std::size_t len = std::min(kChunk, samples - c * kChunk);
        std::vector<double> x(n);
        Acc a;
        for (std::size_t s = 0; s < len; ++s) {
          for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform01(rng) * cum[i].back();
            std::size_t k = std::upper_bound(cum[i].begin(), cum[i].end(), u) - cum[i].begin();
            k = std::min(k, cum[i].size() - 1);
            x[i] = d.factors[i].atoms[k].location;
          }
          const double v = evaluate(f, x);
          a.count += 1.0;
          const double delta = v - a.mean;
          a.mean += delta / a.count;
          a.m2 += delta * (v - a.mean);
        }
        acc[c] = a;
      },
      threads);

  Acc tot;
  for (const Acc& a : acc) {
    if (a.count == 0.0) continue;
    const double nt = tot.count + a.count;
    const double delta = a.mean - tot.mean;
    tot.mean += delta * a.count / nt;
    tot.m2 += a.m2 + delta * delta * tot.count * a.count / nt;
    tot.count = nt;
  }
  McEstimate est;
  est.estimate = tot.mean;
  est.samples = samples;
  est.std_error = samples > 1 ? std::sqrt(tot.m2 / (tot.count - 1.0) / tot.count) : 0.0;
  return est;
}

}  // namespace concbound::oracle
