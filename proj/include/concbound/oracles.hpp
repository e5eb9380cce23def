// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "concbound/core.hpp"

// Ground-truth machinery that does not share code paths with the bounds:
// a discretized moment LP, a product-distribution search producing lower
// bounds on the worst-case tail, and seeded Monte Carlo.
namespace concbound::oracle {

// Is there a distribution on a uniform grid of the support with these
// moments (orders 1..a)?
bool moments_feasible_lp(const SupportInterval& support, std::span<const double> moments,
                         std::size_t grid_points = 2001);

// max P(X >= mu + t) over distributions on a uniform grid matching the
// moments of variable 0. Throws MomentInfeasible when the LP is infeasible.
BoundResult lp_tail_oracle(const MomentSpec& spec, double t, std::size_t grid_points = 2001);

struct ProductSearchOptions {
  std::size_t atoms_per_var = 3;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  std::size_t grid_points = 201;
  int max_sweeps = 40;
  unsigned threads = 0;
};

struct ProductSearchResult {
  BoundResult result;
  ProductDistribution witness;  // on the original support
};

// Lower bound on sup P(sum X_i >= n t + sum mu_i) over independent X_i with
// the given moments, found by coordinate ascent over finitely supported
// factors. Deterministic for a fixed seed.
ProductSearchResult product_search_oracle(const MomentSpec& spec, double t,
                                          const ProductSearchOptions& opts = {});

// Exact tail probability P(sum x_i >= threshold) of a product distribution,
// counting outcomes within `tol` of the threshold as inside.
double tail_probability(const ProductDistribution& d, double threshold, double tol = 1e-11);

// Functionals for expectation checks.
struct IndicatorTail {
  double threshold = 0.0;  // 1{sum x >= threshold}
};
struct ProductAffine {
  std::vector<double> alpha, beta;  // prod (alpha_i + beta_i x_i)
};
struct Mgf {
  double lambda = 0.0;
  double center = 0.0;  // exp(lambda (sum x - center))
};
using Functional = std::variant<IndicatorTail, ProductAffine, Mgf>;

IndicatorTail indicator_tail(const MomentSpec& spec, double t);
double evaluate(const Functional& f, std::span<const double> x);
double exact_expectation(const ProductDistribution& d, const Functional& f);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Samples are drawn in fixed chunks with per-chunk seeds and combined in
// chunk order, so the result does not depend on the thread count.
McEstimate monte_carlo_expectation(const ProductDistribution& d, const Functional& f,
                                   std::size_t samples, std::uint64_t seed,
                                   unsigned threads = 0);

}  // namespace concbound::oracle
