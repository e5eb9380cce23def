// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/extremal.hpp"

#include <cmath>
#include <json.hpp>

#include "concbound/closed_forms.hpp"
#include "concbound/oracles.hpp"

namespace concbound::extremal {

using nlohmann::json;

namespace {

void check_mean_t(double mu, double t) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mean must lie in (0,1)");
  if (!(t >= 0.0) || t > 1.0 - mu) throw DomainError("need 0 <= t <= 1 - mu");
}

json atoms_json(const DiscreteDistribution& d) {
  json a = json::array();
  for (const Atom& at : d.atoms) a.push_back({{"x", at.location}, {"w", at.weight}});
  return a;
}

}  // namespace

DiscreteDistribution extremal_exact_univariate(double mu, double t) {
  check_mean_t(mu, t);
  if (t == 0.0) return {{{mu, 1.0}}};
  const double nu = mu + t;
  return {{{0.0, t / nu}, {nu, mu / nu}}};
}

DiscreteDistribution extremal_bernoulli(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("mean must lie in (0,1)");
  return {{{0.0, 1.0 - mu}, {1.0, mu}}};
}

ProductDistribution extremal_product(const MomentSpec& spec) {
  spec.check_structure();
  if (spec.order() != 1) throw InvalidArgument("extremal_product takes first moments only");
  if (spec.support.lower != 0.0 || spec.support.upper != 1.0)
    throw InvalidArgument("extremal_product expects the support [0,1]");
  ProductDistribution d;
  for (std::size_t i = 0; i < spec.n(); ++i) d.factors.push_back(extremal_bernoulli(spec.mean(i)));
  return d;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::exact1: return "exact1";
    case BoundKind::chernoff: return "chernoff";
    case BoundKind::variational: return "variational";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& s) {
  if (s == "exact1") return BoundKind::exact1;
  if (s == "chernoff") return BoundKind::chernoff;
  if (s == "variational") return BoundKind::variational;
  throw InvalidArgument("unknown bound kind: " + s);
}

AttainmentReport attainment_report(const ProductDistribution& dist, BoundKind kind,
                                   const AttainmentParams& p, double tol) {
  const std::size_t n = p.means.size();
  if (n == 0 || dist.n() != n) throw InvalidArgument("distribution and means differ in size");
  for (const auto& f : dist.factors) f.check(SupportInterval::unit());
  AttainmentReport r;
  r.kind = kind;
  double msum = 0.0;
  for (double m : p.means) msum += m;
  r.threshold = double(n) * p.t + msum;
  r.expected_indicator = oracle::tail_probability(dist, r.threshold);

  switch (kind) {
    case BoundKind::exact1: {
      if (n != 1) throw InvalidArgument("exact1 attainment is univariate");
      r.bound = closed_form::exact_univariate(p.means[0], p.t).value;
      const double nu = r.threshold;
      if (nu <= 0.0 || r.bound >= 1.0) {
        r.majorant = "1";
        r.expected_relaxed = 1.0;
      } else if (nu > 1.0) {
        r.majorant = "0";
        r.expected_relaxed = 0.0;
      } else {
        r.majorant = "x/nu";
        r.expected_relaxed = dist.expectation([&](std::span<const double> x) { return x[0] / nu; });
      }
      break;
    }
    case BoundKind::chernoff: {
      const BoundResult b = closed_form::chernoff_general(p.means, p.t);
      r.bound = b.value;
      const double lam = b.diagnostics.get("lambda_star").value_or(kInf);
      if (std::isfinite(lam)) {
        r.majorant = "exp(lambda*(sum x - threshold))";
        r.expected_relaxed = dist.expectation([&](std::span<const double> x) {
          double s = 0.0;
          for (double v : x) s += v;
          return std::exp(lam * (s - r.threshold));
        });
      } else {
        r.majorant = "indicator (lambda -> inf limit)";
        r.expected_relaxed = r.expected_indicator;
      }
      break;
    }
    case BoundKind::variational: {
      variational::AffineWitness w;
      if (p.witness) {
        w = *p.witness;
        r.bound = w.value(p.means);
      } else {
        auto [b, ww] = variational::solve_variational(
            MomentSpec::from_means(p.means, SupportInterval::unit()), p.t);
        r.bound = b.value;
        w = std::move(ww);
      }
      r.majorant = "prod(alpha_i + beta_i x_i)";
      r.expected_relaxed = dist.expectation([&](std::span<const double> x) {
        double prod = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) prod *= w.alpha[i] + w.beta[i] * x[i];
        return prod;
      });
      break;
    }
  }
  r.gap_indicator = r.bound - r.expected_indicator;
  r.gap_relaxed = std::abs(r.bound - r.expected_relaxed);
  r.attains_indicator = std::abs(r.gap_indicator) <= tol;
  r.attains_relaxed = r.gap_relaxed <= tol;
  return r;
}

std::string AttainmentReport::to_json() const {
  json j = {{"kind", to_string(kind)},
            {"threshold", threshold},
            {"bound", bound},
            {"majorant", majorant},
            {"expected_indicator", expected_indicator},
            {"expected_relaxed", expected_relaxed},
            {"gap_indicator", gap_indicator},
            {"gap_relaxed", gap_relaxed},
            {"attains_indicator", attains_indicator},
            {"attains_relaxed", attains_relaxed}};
  return j.dump();
}

std::string to_json(const DiscreteDistribution& d) {
  return json{{"atoms", atoms_json(d)}}.dump();
}

std::string to_json(const ProductDistribution& d) {
  json f = json::array();
  for (const auto& fac : d.factors) f.push_back({{"atoms", atoms_json(fac)}});
  return json{{"factors", f}}.dump();
}

}  // namespace concbound::extremal
