// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "brute_force.hpp"
#include "concbound/closed_forms.hpp"

using namespace concbound;
using namespace concbound::closed_form;

TEST(Hoeffding, FrozenValues) {
  EXPECT_DOUBLE_EQ(hoeffding(1, 0.0).value, 1.0);
  EXPECT_NEAR(hoeffding(2, 0.1).value, 0.960789, 5e-7);
  EXPECT_NEAR(hoeffding(1, 0.5).value, 0.606531, 5e-7);
  const std::vector<double> w{2.0, 2.0};
  EXPECT_NEAR(hoeffding(2, 0.2, w).value, hoeffding(2, 0.1).value, 1e-15);
}

TEST(ExactUnivariate, Examples) {
  EXPECT_DOUBLE_EQ(exact_univariate(0.3, 0.0).value, 1.0);
  EXPECT_DOUBLE_EQ(exact_univariate(0.3, 0.3).value, 0.5);
  EXPECT_DOUBLE_EQ(exact_univariate(0.5, 0.5).value, 0.5);
  EXPECT_DOUBLE_EQ(exact_univariate(0.3, 0.8).value, 0.0);
  EXPECT_THROW(exact_univariate(1.2, 0.1), DomainError);
}

TEST(ChernoffUnivariate, Examples) {
  EXPECT_DOUBLE_EQ(chernoff_univariate(0.3, 0.0).first.value, 1.0);
  // 1-D minimization of exp(-l nu)(1 + mu(e^l - 1)) done offline.
  EXPECT_NEAR(chernoff_univariate(0.3, 0.3).first.value, 0.8252722119744941, 1e-12);
  EXPECT_NEAR(chernoff_univariate(0.3, 0.7).first.value, 0.3, 1e-15);
  EXPECT_EQ(chernoff_univariate(0.3, 0.7).first.diagnostics.status, "limit");
  EXPECT_EQ(chernoff_univariate(0.3, 0.75).first.value, 0.0);
}

TEST(ChernoffUnivariate, WitnessIsAChordMajorant) {
  for (double mu : {0.1, 0.4, 0.8})
    for (double t : {0.01, 0.05, 0.15}) {
      if (mu + t >= 1) continue;
      auto [r, w] = chernoff_univariate(mu, t);
      const double nu = mu + t;
      EXPECT_NEAR(w.lambda_star, std::log(nu * (1 - mu) / (mu * (1 - nu))), 1e-12);
      for (int i = 0; i <= 10000; ++i) {
        const double x = i / 10000.0;
        EXPECT_LE(std::exp(w.lambda_star * (x - nu)), w.alpha + w.beta * x + 1e-12);
      }
      EXPECT_NEAR(w.alpha + w.beta * mu, r.value, 1e-12);
    }
}

TEST(ChernoffIid, Examples) {
  EXPECT_NEAR(chernoff_iid(2, 0.3, 0.1).value, std::exp(-2 * testing_oracle::kl(0.4, 0.3)), 1e-14);
  EXPECT_NEAR(chernoff_iid(2, 0.3, 0.1).value, 0.95583990612282620, 1e-14);
  EXPECT_DOUBLE_EQ(chernoff_iid(1, 0.3, 0.2).value, chernoff_univariate(0.3, 0.2).first.value);
  EXPECT_DOUBLE_EQ(chernoff_iid(7, 0.3, 0.0).value, 1.0);
}

TEST(ChernoffGeneral, Examples) {
  const std::vector<double> m{0.2, 0.2, 0.8, 0.8};
  // Offline: 1e6-point grid over lambda in [-20,20], then bounded refinement.
  EXPECT_NEAR(chernoff_general(m, 0.1).value, 0.8826072127623573, 1e-9);
  const std::vector<double> z{0.3, 0.6};
  EXPECT_DOUBLE_EQ(chernoff_general(z, 0.0).value, 1.0);
}

TEST(ChernoffGeneral, EqualMeansMatchIid) {
  for (double mu : {0.1, 0.35, 0.7})
    for (double t : {0.02, 0.1, 0.2}) {
      if (mu + t >= 1) continue;
      for (std::size_t n : {2u, 5u}) {
        std::vector<double> m(n, mu);
        EXPECT_NEAR(chernoff_general(m, t).value, chernoff_iid(n, mu, t).value, 1e-10);
      }
    }
}

TEST(Quadratic, SandwichedBetweenChernoffAndHoeffding) {
  const std::vector<double> m{0.2, 0.8};
  const auto q = quadratic_upper_diff_means(m, 0.1);
  EXPECT_EQ(q.diagnostics.status, "experimental");
  EXPECT_NEAR(q.value, 0.9548416039104165, 1e-12);
  EXPECT_LE(q.value, hoeffding(2, 0.1).value);
  EXPECT_GE(q.value, chernoff_general(m, 0.1).value - 1e-9);
  const std::vector<double> half{0.5, 0.3};
  EXPECT_THROW(quadratic_upper_diff_means(half, 0.1), DomainError);
}

TEST(Bernstein, Examples) {
  EXPECT_DOUBLE_EQ(bernstein(2, 0.0, 0.2, 1.0).value, 1.0);
  EXPECT_NEAR(bernstein(2, 0.2, 0.2, 1.0).value, 0.786628, 5e-7);
  EXPECT_GT(bernstein(2, 0.2, 1e12, 1.0).value, 1 - 1e-9);
}

TEST(Bennett, ExamplesAndBernsteinDominance) {
  EXPECT_DOUBLE_EQ(bennett(2, 0.0, 0.2, 1.0).value, 1.0);
  EXPECT_NEAR(bennett(2, 0.1, 0.2, 1.0).value, std::exp(-0.2 * (2 * std::log(2.0) - 1)), 1e-14);
  EXPECT_NEAR(bennett(2, 0.1, 0.2, 1.0).value, 0.92565019746243138, 1e-14);
  for (double s2 : {0.05, 0.3, 1.0})
    for (double a : {0.5, 1.0, 3.0})
      for (double t = 0.0; t <= 1.0; t += 0.05) {
        const double n = 3;
        const double b = std::exp(-t * t * n * n / (2 * (s2 + a * t * n / 3)));
        EXPECT_LE(bennett(3, t, s2, a).value, b + 1e-15);
      }
}

TEST(LargeDeviation, ExamplesAndIdentity) {
  EXPECT_DOUBLE_EQ(large_deviation_rate(0.3, 0.0), 0.0);
  // Numeric Fenchel conjugate computed offline.
  EXPECT_NEAR(large_deviation_rate(0.3, 0.3), 0.19204199316179815, 1e-10);
  EXPECT_NEAR(kl_bernoulli(0.6, 0.3), testing_oracle::kl(0.6, 0.3), 1e-15);
  for (int i = 1; i <= 9; ++i) {
    const double mu = i / 10.0;
    for (double t = 0.0; t <= 1.0 - mu - 1e-9; t += 0.05)
      EXPECT_NEAR(chernoff_univariate(mu, t).first.value, std::exp(-large_deviation_rate(mu, t)),
                  1e-12);
  }
}

TEST(Linear, Examples) {
  EXPECT_NEAR(linear_bound(0.6, 0.2).value, 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(linear_bound(0.6, 0.0).value, 1.0);
  for (double mu : {0.1, 0.5, 0.9})
    for (double t = 0; t <= 1 - mu; t += 0.05)
      EXPECT_DOUBLE_EQ(linear_bound(mu, t).value, exact_univariate(mu, t).value);
}

// Every bound is nonincreasing in t; exact <= chernoff pointwise.
TEST(ClosedForms, MonotoneAndOrdered) {
  for (double mu : {0.1, 0.3, 0.6, 0.85}) {
    double prev[5] = {2, 2, 2, 2, 2};
    for (double t = 0.0; t <= 1.0 - mu; t += 0.002) {
      const double v[5] = {exact_univariate(mu, t).value, chernoff_univariate(mu, t).first.value,
                           chernoff_iid(4, mu, t).value, hoeffding(4, t).value,
                           bernstein(4, t, mu, 1.0).value};
      for (int k = 0; k < 5; ++k) {
        EXPECT_LE(v[k], prev[k] + 1e-15);
        prev[k] = v[k];
      }
      EXPECT_LE(v[0], v[1] + 1e-15);
    }
  }
}
