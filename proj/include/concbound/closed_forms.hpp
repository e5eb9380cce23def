// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <span>
#include <utility>

#include "concbound/core.hpp"

// Analytic bounds on P(sum X_i >= n t + sum mu_i). Unless stated otherwise the
// variables live on [0,1] and `mu` is the common mean.
namespace concbound::closed_form {

// Chordal majorant of x -> exp(lambda (x - nu)) on [0,1]: alpha + beta x.
struct ChernoffWitness {
  double lambda_star = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
};

// exp(-2 n^2 t^2 / sum w_i^2).
BoundResult hoeffding(std::size_t n, double t, std::span<const double> widths);
BoundResult hoeffding(std::size_t n, double t);  // unit widths

// Worst case over distributions with mean mu: mu/(mu+t), or 0 past the support.
BoundResult exact_univariate(double mu, double t);

// inf over lambda of E[exp(lambda (X - mu - t))] with E[X] = mu on [0,1].
// At mu + t = 1 the lambda -> inf limit mu is returned, beyond it 0.
std::pair<BoundResult, ChernoffWitness> chernoff_univariate(double mu, double t);

BoundResult chernoff_iid(std::size_t n, double mu, double t);

// Same quantity for unequal means; scalar convex minimization over lambda.
// Diagnostics carry "lambda_star".
BoundResult chernoff_general(std::span<const double> means, double t);

// Quadratic upper bound on the log-mgf, optimized over lambda. Experimental.
BoundResult quadratic_upper_diff_means(std::span<const double> means, double t);

// exp(-(n^2 t^2 / 2) / (v + c n t / 3)).
BoundResult bernstein(std::size_t n, double t, double v, double c);

// exp(-(sigma2 / a^2) h(a t n / sigma2)), h(u) = (1+u) log(1+u) - u.
BoundResult bennett(std::size_t n, double t, double sigma2, double a);

// Bernoulli relative entropy kl(nu, mu); +inf for nu > 1.
double kl_bernoulli(double nu, double mu);

// kl(mu + t, mu).
double large_deviation_rate(double mu, double t);

// Best bound of the form a * sum x_i: mu/(mu+t), independent of n.
BoundResult linear_bound(double mu, double t);

}  // namespace concbound::closed_form
