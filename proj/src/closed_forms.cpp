// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/closed_forms.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace concbound::closed_form {

namespace {

void require_mean(double mu) {
  if (!(mu > 0.0 && mu < 1.0))
    throw DomainError("mean must lie in (0,1), got " + std::to_string(mu));
}

void require_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError("deviation t must be finite and >= 0");
}

// log(1 + mu (e^l - 1)) without overflow for large l.
double log_mgf(double mu, double l) {
  if (l > 0.0) return l + std::log(mu + (1.0 - mu) * std::exp(-l));
  return std::log1p(mu * std::expm1(l));
}

// d/dl log_mgf: the tilted mean.
double tilted_mean(double mu, double l) {
  if (l > 0.0) return mu / (mu + (1.0 - mu) * std::exp(-l));
  const double e = std::exp(l);
  return mu * e / (1.0 - mu + mu * e);
}

double xlogy_ratio(double x, double y) {  // x log(x/y), 0 log 0 = 0
  return x == 0.0 ? 0.0 : x * std::log(x / y);
}

}  // namespace

BoundResult hoeffding(std::size_t n, double t, std::span<const double> widths) {
  require_t(t);
  if (widths.size() != n) throw InvalidArgument("hoeffding: need one width per variable");
  double s = 0.0;
  for (double w : widths) {
    if (!(w > 0.0)) throw InvalidArgument("hoeffding: widths must be positive");
    s += w * w;
  }
  const double nn = double(n);
  return BoundResult::make("hoeffding", std::exp(-2.0 * nn * nn * t * t / s));
}

BoundResult hoeffding(std::size_t n, double t) {
  std::vector<double> w(n, 1.0);
  return hoeffding(n, t, w);
}

BoundResult exact_univariate(double mu, double t) {
  require_mean(mu);
  require_t(t);
  const double v = mu + t > 1.0 ? 0.0 : mu / (mu + t);
  return BoundResult::make("exact1", v);
}

std::pair<BoundResult, ChernoffWitness> chernoff_univariate(double mu, double t) {
  require_mean(mu);
  require_t(t);
  const double nu = mu + t;
  ChernoffWitness w;
  if (t == 0.0) return {BoundResult::make("chernoff", 1.0), w};
  if (nu >= 1.0) {
    // lambda -> inf: the chord of exp(lambda (x - nu)) tends to x (nu = 1) or 0.
    BoundResult r = BoundResult::make("chernoff", nu == 1.0 ? mu : 0.0);
    r.diagnostics.status = "limit";
    w.lambda_star = kInf;
    w.alpha = 0.0;
    w.beta = nu == 1.0 ? 1.0 : 0.0;
    return {r, w};
  }
  const double v = std::pow(mu / nu, nu) * std::pow((1.0 - mu) / (1.0 - nu), 1.0 - nu);
  w.lambda_star = std::log(nu * (1.0 - mu) / (mu * (1.0 - nu)));
  w.alpha = std::exp(-w.lambda_star * nu);
  w.beta = w.alpha * std::expm1(w.lambda_star);
  return {BoundResult::make("chernoff", v), w};
}

BoundResult chernoff_iid(std::size_t n, double mu, double t) {
  auto [r, w] = chernoff_univariate(mu, t);
  r.value = std::pow(r.value, double(n));
  r.diagnostics.set("lambda_star", w.lambda_star);
  return r;
}

BoundResult chernoff_general(std::span<const double> means, double t) {
  require_t(t);
  if (means.empty()) throw InvalidArgument("chernoff_general: no means");
  for (double m : means) require_mean(m);
  const double n = double(means.size());
  const double nu = std::accumulate(means.begin(), means.end(), 0.0) / n + t;

  BoundResult r = BoundResult::make("chernoff-general", 1.0);
  if (t == 0.0) {
    r.diagnostics.set("lambda_star", 0.0);
    return r;
  }
  if (nu >= 1.0) {
    double p = 1.0;
    for (double m : means) p *= m;
    r.value = nu == 1.0 ? p : 0.0;
    r.diagnostics.status = "limit";
    r.diagnostics.set("lambda_star", kInf);
    return r;
  }

  auto f = [&](double l) {
    double s = -n * l * nu;
    for (double m : means) s += log_mgf(m, l);
    return s;
  };
  auto df = [&](double l, double& d2) {
    double g = -n * nu;
    d2 = 0.0;
    for (double m : means) {
      const double p = tilted_mean(m, l);
      g += p;
      d2 += p * (1.0 - p);
    }
    return g;
  };

  // f is convex with f'(0) = -n t < 0, so the minimizer is in (0, 50].
  double lo = 0.0, hi = 50.0, l = 1.0, d2 = 0.0;
  int it = 0;
  double g = 0.0;
  double ghi = df(hi, d2);
  if (ghi < 0.0) {
    l = hi;
    g = ghi;
    r.diagnostics.warnings.push_back("minimizer beyond the lambda bracket");
  } else {
    for (; it < 200; ++it) {
      g = df(l, d2);
      if (std::abs(g) <= 1e-10) break;
      if (g > 0.0) hi = l; else lo = l;
      double next = d2 > 0.0 ? l - g / d2 : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
      l = next;
    }
    if (std::abs(g) > 1e-10 && hi - lo >= 1e-15 * std::max(1.0, hi))
      throw SolverFailure("chernoff_general: Newton iteration did not converge",
                          "numerical_limit");
  }
  r.value = std::exp(f(l));
  r.diagnostics.iterations = it;
  r.diagnostics.dual_residual = std::abs(g);
  r.diagnostics.set("lambda_star", l);
  return r;
}

BoundResult quadratic_upper_diff_means(std::span<const double> means, double t) {
  require_t(t);
  if (means.empty()) throw InvalidArgument("quadratic_upper_diff_means: no means");
  double c = 0.0;
  for (double m : means) {
    require_mean(m);
    if (m == 0.5) throw DomainError("quadratic_upper_diff_means: mean equal to 1/2");
    c += (2.0 * m - 1.0) / std::log(m / (1.0 - m));
  }
  const double n = double(means.size());
  BoundResult r = BoundResult::make("quadratic", std::exp(-n * n * t * t / c));
  r.diagnostics.status = "experimental";
  r.diagnostics.set("curvature_sum", c);
  r.diagnostics.set("lambda_star", 2.0 * n * t / c);
  return r;
}

BoundResult bernstein(std::size_t n, double t, double v, double c) {
  require_t(t);
  if (!(v > 0.0) || !(c > 0.0)) throw InvalidArgument("bernstein: v and c must be positive");
  const double nn = double(n);
  if (std::isinf(v)) return BoundResult::make("bernstein", 1.0);
  return BoundResult::make("bernstein",
                           std::exp(-(nn * nn * t * t / 2.0) / (v + c * nn * t / 3.0)));
}

BoundResult bennett(std::size_t n, double t, double sigma2, double a) {
  require_t(t);
  if (!(sigma2 > 0.0) || !(a > 0.0))
    throw InvalidArgument("bennett: sigma2 and a must be positive");
  const double u = a * t * double(n) / sigma2;
  const double h = (1.0 + u) * std::log1p(u) - u;
  return BoundResult::make("bennett", std::exp(-(sigma2 / (a * a)) * h));
}

double kl_bernoulli(double nu, double mu) {
  if (nu > 1.0 || nu < 0.0) return kInf;
  return xlogy_ratio(nu, mu) + xlogy_ratio(1.0 - nu, 1.0 - mu);
}

double large_deviation_rate(double mu, double t) {
  require_mean(mu);
  require_t(t);
  return kl_bernoulli(mu + t, mu);
}

BoundResult linear_bound(double mu, double t) {
  require_mean(mu);
  require_t(t);
  return BoundResult::make("linear", mu + t > 1.0 ? 0.0 : mu / (mu + t));
}

}  // namespace concbound::closed_form
