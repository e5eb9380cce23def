// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"
#include "concbound/closed_forms.hpp"
#include "concbound/oracles.hpp"
#include "concbound/variational.hpp"

using namespace concbound;
using namespace concbound::variational;

namespace {

using Points = std::vector<std::vector<double>>;

void expect_same_points(const Points& a, const Points& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-9);
}

MomentSpec iid(std::size_t n, double mu) { return MomentSpec::iid(n, SupportInterval::unit(), {mu}); }

void expect_witness_feasible(const ExtremalPointSet& pts, const AffineWitness& w) {
  for (std::size_t i = 0; i < w.alpha.size(); ++i) {
    EXPECT_GE(w.alpha[i], 0.0);
    EXPECT_GE(w.alpha[i] + w.beta[i], -1e-15);
  }
  for (const auto& x : pts.points()) EXPECT_GE(w.log_product(x), -1e-9);
}

}  // namespace

TEST(Enumerate, SmallExamples) {
  expect_same_points(enumerate_extremal_iid(2, 0.8).points(), {{0, 0.8}, {0, 1}, {1, 1}});
  expect_same_points(enumerate_extremal_iid(2, 1.5).points(), {{0.5, 1}, {1, 1}});
  expect_same_points(enumerate_extremal_iid(3, 1.8).points(), {{0, 0.8, 1}, {0, 1, 1}, {1, 1, 1}});
  EXPECT_THROW(enumerate_extremal_iid(3, 3.2), EmptyTail);
  EXPECT_EQ(enumerate_extremal_iid(3, 3.0).size(), 1u);
}

TEST(Enumerate, SnapsNearIntegerThresholds) {
  const auto a = enumerate_extremal_iid(4, 2.0 + 1e-13);
  EXPECT_EQ(a.threshold, 2.0);
  expect_same_points(a.points(), enumerate_extremal_iid(4, 2.0).points());
}

TEST(Enumerate, MatchesBruteForceIid) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int cases = 0;
  for (std::size_t n = 1; n <= 6; ++n)
    for (int k = 0; k < 20; ++k, ++cases) {
      const double s = k < 2 ? double(k) * double(n) / 2.0 : u(rng) * double(n);
      const auto got = enumerate_extremal_iid(n, s);
      for (const auto& p : got.points()) {
        double sum = 0;
        for (double v : p) sum += v;
        EXPECT_GE(sum, got.threshold - 1e-12);
      }
      expect_same_points(got.points(), testing_oracle::polytope_vertices({n}, got.threshold));
    }
  EXPECT_GE(cases, 100);
}

TEST(Enumerate, MatchesBruteForceTwoBlock) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (std::size_t n = 2; n <= 6; ++n)
    for (std::size_t m = 1; m < n; ++m)
      for (int k = 0; k < 6; ++k) {
        const double mu1 = u(rng), mu2 = u(rng);
        const double slack = double(n) - (m * mu1 + (n - m) * mu2);
        const double t = u(rng) * slack / double(n);
        const auto got = enumerate_extremal_two_block(n, m, mu1, mu2, t);
        const auto want = testing_oracle::polytope_vertices({m, n - m}, got.threshold);
        expect_same_points(got.points(), want);
        EXPECT_LE(got.size(), (n + 1) * (n + 1));
      }
}

TEST(Enumerate, TwoBlockExampleAndCollapse) {
  const auto p = enumerate_extremal_two_block(4, 2, 0.2, 0.8, 0.1);
  EXPECT_NEAR(p.threshold, 2.4, 1e-15);
  expect_same_points(p.points(), testing_oracle::polytope_vertices({2, 2}, 2.4));
  const auto c = enumerate_extremal_two_block(4, 4, 0.3, 0.7, 0.1);
  expect_same_points(c.points(), enumerate_extremal_iid(4, 4 * 0.4).points());
  EXPECT_THROW(enumerate_extremal_two_block(2, 1, 0.9, 0.9, 0.2), EmptyTail);
}

TEST(SolveVariational, TrivialAndEmptyTail) {
  auto [r0, w0] = solve_variational(iid(3, 0.3), 0.0);
  EXPECT_EQ(r0.value, 1.0);
  EXPECT_EQ(w0.alpha, std::vector<double>(3, 1.0));
  EXPECT_EQ(w0.beta, std::vector<double>(3, 0.0));
  auto [r1, w1] = solve_variational(iid(2, 0.3), 0.8);
  EXPECT_EQ(r1.value, 0.0);
  EXPECT_EQ(r1.diagnostics.status, "empty_tail");
  EXPECT_THROW(solve_variational(MomentSpec::iid(2, SupportInterval::unit(), {0.3, 0.1}), 0.1),
               InvalidArgument);
}

// (alpha + 0.3 beta)^2 / (alpha (alpha + 0.8 beta)) minimized by hand: ratio 5/6.
TEST(SolveVariational, Pinpoints) {
  auto [r, w] = solve_variational(iid(2, 0.3), 0.1);
  EXPECT_NEAR(r.value, 0.9375, 1e-9);
  EXPECT_NEAR(w.beta[0] / w.alpha[0], 5.0 / 6.0, 1e-5);
  auto [r2, w2] = solve_variational(iid(2, 0.3), 0.65);
  EXPECT_NEAR(r2.value, 0.1, 1e-9);
  EXPECT_NEAR(w2.alpha[0], 0.0, 1e-9);
  // Witness normalization: binding vertex product is exactly one.
  EXPECT_NEAR(w2.beta[0], 1.0 / std::sqrt(0.9), 1e-6);
}

TEST(SolveVariational, UnivariateIsMarkov) {
  for (double mu : {0.2, 0.5})
    for (double t : {0.1, 0.3})
      EXPECT_NEAR(solve_variational(iid(1, mu), t).first.value, mu / (mu + t), 1e-9);
}

TEST(SolveVariational, WitnessFeasibleAndDominance) {
  for (std::size_t n : {2u, 3u, 5u, 10u})
    for (double mu = 0.1; mu < 0.95; mu += 0.2)
      for (double t : {0.03, 0.1, 0.25}) {
        if (mu + t >= 1.0) continue;
        auto [r, w] = solve_variational(iid(n, mu), t);
        const auto pts = enumerate_extremal_iid(n, double(n) * (mu + t));
        expect_witness_feasible(pts, w);
        const auto means = std::vector<double>(n, mu);
        EXPECT_NEAR(w.value(means), r.value, 1e-12);
        EXPECT_LE(r.value, *r.diagnostics.get("exp_convex_objective") + 1e-12);
        EXPECT_LE(r.value, closed_form::chernoff_iid(n, mu, t).value + 1e-9);
      }
}

TEST(SolveVariational, ClosedFormN2AllRegimes) {
  int regimes[4] = {0, 0, 0, 0};
  for (double mu : {0.1, 0.25, 0.3, 0.45, 0.7})
    for (int k = 1; k <= 20; ++k) {
      const double t = (1.0 - mu) * k / 21.0;
      const auto c = closed_form_n2(mu, t);
      ++regimes[c.regime];
      EXPECT_NEAR(c.value, solve_variational(iid(2, mu), t).first.value, 1e-8) << mu << " " << t;
      EXPECT_LE(c.value, c.printed_value + 1e-12);
    }
  EXPECT_GT(regimes[1], 0);
  EXPECT_GT(regimes[2], 0);
  EXPECT_GT(regimes[3], 0);
}

TEST(ClosedFormN2, ContinuousAcrossRegimeBoundaries) {
  for (double mu : {0.05, 0.15, 0.3, 0.45}) {
    const double b1 = 0.5 - mu, b2 = (1 - mu) * (1 - mu) / (2 - mu);
    for (double b : {b1, b2}) {
      const auto lo = closed_form_n2(mu, b - 1e-10), hi = closed_form_n2(mu, b + 1e-10);
      EXPECT_NEAR(lo.value, hi.value, 1e-8);
    }
  }
  const auto c = closed_form_n2(0.3, 0.65);
  EXPECT_EQ(c.regime, 3);
  EXPECT_NEAR(c.value, 0.1, 1e-12);
  EXPECT_NEAR(c.beta, 1.0 / std::sqrt(0.9), 1e-12);
  EXPECT_NEAR(c.printed_beta, 0.3 / std::sqrt(0.9), 1e-12);
  // The printed first-regime alpha is not optimal.
  const auto r1 = closed_form_n2(0.1, 0.2);
  EXPECT_EQ(r1.regime, 1);
  EXPECT_GT(r1.printed_value, r1.value + 1e-4);
}

TEST(SolveVariational, BelowChernoffForModerateN) {
  for (std::size_t n : {3u, 10u})
    for (double mu : {0.1, 0.6})
      for (double t = 0.05; t < 1.0 - mu; t += 0.1)
        EXPECT_LT(solve_variational(iid(n, mu), t).first.value,
                  closed_form::chernoff_iid(n, mu, t).value + 1e-12);
}

TEST(SolveVariational, SandwichWithProductOracle) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (int k = 0; k < 6; ++k) {
    const double mu = u(rng), t = (1 - mu) * u(rng);
    const auto v = solve_variational(iid(2, mu), t).first.value;
    oracle::ProductSearchOptions o;
    o.restarts = 3;
    o.seed = 100 + k;
    EXPECT_LE(oracle::product_search_oracle(iid(2, mu), t, o).result.value, v + 1e-9);
  }
}

TEST(SolveVariational, UnequalMeans) {
  const auto spec = MomentSpec::from_means({0.2, 0.2, 0.5, 0.5});
  auto [r, w] = solve_variational(spec, 0.1);
  const auto pts = enumerate_extremal_two_block(4, 2, 0.2, 0.5, 0.1);
  expect_witness_feasible(pts, w);
  const std::vector<double> m{0.2, 0.2, 0.5, 0.5};
  EXPECT_LE(r.value, closed_form::chernoff_general(m, 0.1).value + 1e-9);
  EXPECT_NEAR(w.value(m), r.value, 1e-12);

  const auto three = MomentSpec::from_means({0.1, 0.3, 0.5});
  auto [r3, w3] = solve_variational(three, 0.1);
  EXPECT_LE(r3.value, closed_form::chernoff_general(three.means(), 0.1).value + 1e-9);
  EXPECT_THROW(solve_variational(MomentSpec::from_means({0.1, 0.2, 0.3, 0.1, 0.2, 0.3, 0.1, 0.2, 0.3}),
                                 0.1),
               InvalidArgument);
}

TEST(Gap, Properties) {
  EXPECT_EQ(variational_gap_to_chernoff(5, 0.3, 0.0), 0.0);
  const double g3 = variational_gap_to_chernoff(3, 0.6, 0.2);
  const double g10 = variational_gap_to_chernoff(10, 0.6, 0.2);
  const double g100 = variational_gap_to_chernoff(100, 0.6, 0.2);
  EXPECT_GE(g3, -1e-12);
  EXPECT_LE(g100, g10 + 1e-12);
  EXPECT_LE(g10, g3 + 1e-12);
}
