// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <random>

#include "concbound/core.hpp"
#include "concbound/oracles.hpp"

using namespace concbound;

TEST(SupportInterval, RejectsBadIntervals) {
  EXPECT_THROW((SupportInterval{1.0, 0.0}.check()), InvalidArgument);
  EXPECT_THROW((SupportInterval{0.0, kInf}.check()), InvalidArgument);
  EXPECT_NO_THROW((SupportInterval{-kInf, 1.0}.check()));
  EXPECT_FALSE((SupportInterval{-kInf, 1.0}.bounded()));
}

TEST(MomentSpec, BlocksGroupIdenticalMoments) {
  auto s = MomentSpec::from_means({0.2, 0.5, 0.2, 0.5, 0.5});
  auto b = s.block_partition();
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(b[1], (std::vector<std::size_t>{1, 3, 4}));
  EXPECT_DOUBLE_EQ(tail_threshold(s, 0.1), 0.5 + 1.9);
}

TEST(MomentSpec, StructuralErrors) {
  MomentSpec s;
  s.moments = {{0.3}, {0.3, 0.1}};
  EXPECT_NO_THROW(s.check_structure());
  EXPECT_EQ(s.order(), 1u);
  s.moments = {{0.3}, {}};
  EXPECT_THROW(s.check_structure(), InvalidArgument);
  s.moments = {{std::nan("")}};
  EXPECT_THROW(s.check_structure(), InvalidArgument);
  auto ok = MomentSpec::iid(2, SupportInterval::unit(), {0.3, 0.1});
  EXPECT_THROW(ok.moment(0, 3), DegreeExceedsMoments);
  EXPECT_DOUBLE_EQ(ok.moment(1, 0), 1.0);
}

TEST(ValidateMoments, SecondMomentBounds) {
  auto at = [](double m1, double m2) {
    return validate_moments(MomentSpec::iid(1, SupportInterval::unit(), {m1, m2}));
  };
  EXPECT_TRUE(at(0.3, 0.09).ok);  // Dirac at the mean
  EXPECT_FALSE(at(0.3, 0.31).ok);
  EXPECT_TRUE(at(0.3, 0.15).ok);
  EXPECT_FALSE(at(0.3, 0.08).ok);
  EXPECT_FALSE(validate_moments(MomentSpec::from_means({1.0})).ok);
  EXPECT_THROW(validate_moments_or_throw(MomentSpec::iid(1, SupportInterval::unit(), {0.3, 0.31})),
               MomentInfeasible);
}

// Property: the analytic check agrees with LP feasibility on a grid away from
// the boundary (the LP is discretized).
TEST(ValidateMoments, AgreesWithLpOracle) {
  for (double m1 = 0.1; m1 < 0.95; m1 += 0.2)
    for (double f = -0.2; f <= 1.2; f += 0.35) {
      const double m2 = m1 * m1 + f * (m1 - m1 * m1);
      const bool analytic =
          validate_moments(MomentSpec::iid(1, SupportInterval::unit(), {m1, m2})).ok;
      const std::vector<double> mm{m1, m2};
      EXPECT_EQ(analytic, oracle::moments_feasible_lp(SupportInterval::unit(), mm, 401))
          << m1 << " " << m2;
    }
}

TEST(ValidateMoments, TransportedToOtherSupports) {
  EXPECT_TRUE(validate_moments(MomentSpec::iid(1, SupportInterval::symmetric(), {-0.3, 0.1})).ok);
  EXPECT_FALSE(validate_moments(MomentSpec::iid(1, SupportInterval::symmetric(), {-0.3, 1.2})).ok);
  // Upper-bounded only: variance must be nonnegative.
  EXPECT_TRUE(validate_moments(MomentSpec::iid(1, {-kInf, 1.0}, {-0.3, 1.0})).ok);
  EXPECT_FALSE(validate_moments(MomentSpec::iid(1, {-kInf, 1.0}, {-0.3, 0.05})).ok);
}

TEST(NormalizeSupport, Examples) {
  auto id = normalize_support(MomentSpec::from_means({0.3}));
  EXPECT_TRUE(id.map.is_identity());
  EXPECT_DOUBLE_EQ(id.spec.mean(0), 0.3);

  auto mid = normalize_support(MomentSpec::iid(1, SupportInterval::symmetric(), {0.0}));
  EXPECT_DOUBLE_EQ(mid.spec.mean(0), 0.5);

  auto b = normalize_support(MomentSpec::iid(1, SupportInterval::symmetric(), {-0.3, 0.1}));
  EXPECT_NEAR(b.spec.moment(0, 1), 0.35, 1e-15);
  EXPECT_NEAR(b.spec.moment(0, 2), 0.125, 1e-15);

  EXPECT_THROW(normalize_support(MomentSpec::iid(1, {-kInf, 1.0}, {0.0})), UnboundedSupport);
}

// A 3-atom law with moments (-0.3, 0.1) on [-1,1] pushed through the map.
TEST(NormalizeSupport, MatchesPushedForwardDistribution) {
  const double x[3] = {-0.5, -0.3, -0.1};
  // Weights from the Vandermonde system, Gauss-Jordan by hand.
  double A[3][4] = {{1, 1, 1, 1},
                    {x[0], x[1], x[2], -0.3},
                    {x[0] * x[0], x[1] * x[1], x[2] * x[2], 0.1}};
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r)
      if (r != c) {
        const double f = A[r][c] / A[c][c];
        for (int k = 0; k < 4; ++k) A[r][k] -= f * A[c][k];
      }
  DiscreteDistribution e;
  for (int i = 0; i < 3; ++i) e.atoms.push_back({x[i], A[i][3] / A[i][i]});
  for (const auto& a : e.atoms) ASSERT_GE(a.weight, 0.0);
  EXPECT_NEAR(e.moment(1), -0.3, 1e-14);
  EXPECT_NEAR(e.moment(2), 0.1, 1e-14);
  const double y1 = e.expectation([](double v) { return (v + 1) / 2; });
  const double y2 = e.expectation([](double v) { return (v + 1) * (v + 1) / 4; });
  auto ns = normalize_support(MomentSpec::iid(1, SupportInterval::symmetric(), {-0.3, 0.1}));
  EXPECT_NEAR(ns.spec.moment(0, 1), y1, 1e-14);
  EXPECT_NEAR(ns.spec.moment(0, 2), y2, 1e-14);
}

TEST(NormalizeSupport, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double lo = -5 + 4 * u(rng), hi = lo + 0.5 + 3 * u(rng);
    // Moments of a random 3-atom law on [lo, hi].
    DiscreteDistribution d;
    double tot = 0;
    for (int i = 0; i < 3; ++i) {
      d.atoms.push_back({lo + (hi - lo) * u(rng), 0.1 + u(rng)});
      tot += d.atoms.back().weight;
    }
    for (auto& a : d.atoms) a.weight /= tot;
    std::vector<double> m{d.moment(1), d.moment(2), d.moment(3)};
    MomentSpec s = MomentSpec::iid(1, {lo, hi}, m);
    auto ns = normalize_support(s);
    auto back = ns.map.moments_from_unit(ns.spec.moments[0]);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], m[i], 1e-12 * std::max(1.0, std::abs(m[i])));
  }
}

TEST(Distributions, ChecksAndMoments) {
  DiscreteDistribution d{{{0.0, 0.25}, {1.0, 0.75}}};
  EXPECT_NO_THROW(d.check(SupportInterval::unit()));
  EXPECT_DOUBLE_EQ(d.moment(1), 0.75);
  DiscreteDistribution bad{{{0.0, 0.5}, {2.0, 0.5}}};
  EXPECT_THROW(bad.check(SupportInterval::unit()), InvalidArgument);
  DiscreteDistribution unnorm{{{0.0, 0.5}, {1.0, 0.4}}};
  EXPECT_THROW(unnorm.check(SupportInterval::unit()), InvalidArgument);

  ProductDistribution p{{d, d}};
  EXPECT_EQ(p.outcome_count(), 4u);
  double tot = 0;
  p.for_each_outcome([&](std::span<const double>, double w) { tot += w; });
  EXPECT_NEAR(tot, 1.0, 1e-15);
  EXPECT_NEAR(p.expectation([](std::span<const double> x) { return x[0] * x[1]; }), 0.5625, 1e-15);
}

TEST(BoundResult, Clamped) {
  auto r = BoundResult::make("x", 1.7);
  EXPECT_EQ(r.clamped(), 1.0);
  EXPECT_LE(r.clamped(), r.value);
  r.value = 0.4;
  EXPECT_EQ(r.clamped(), 0.4);
}
