// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "concbound/oracles.hpp"

namespace concbound {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double binom(std::size_t k, std::size_t j) {
  double r = 1.0;
  for (std::size_t i = 1; i <= j; ++i) r = r * double(k - j + i) / double(i);
  return r;
}

}  // namespace

void SupportInterval::check() const {
  if (std::isnan(lower) || std::isnan(upper))
    throw InvalidArgument("support endpoint is NaN");
  if (!(lower < upper)) throw InvalidArgument("support requires lower < upper");
  if (upper == kInf)
    throw InvalidArgument("support must be bounded above");
}

// ---------------------------------------------------------------------------

MomentSpec MomentSpec::iid(std::size_t n, SupportInterval support,
                           std::vector<double> per_variable) {
  MomentSpec s;
  s.support = support;
  s.moments.assign(n, per_variable);
  if (n > 0) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    s.blocks.push_back(std::move(all));
  }
  return s;
}

MomentSpec MomentSpec::from_means(std::vector<double> means, SupportInterval support) {
  MomentSpec s;
  s.support = support;
  for (double m : means) s.moments.push_back({m});
  return s;
}

std::size_t MomentSpec::order() const {
  if (moments.empty()) return 0;
  std::size_t a = moments.front().size();
  for (const auto& m : moments) a = std::min(a, m.size());
  return a;
}

std::vector<double> MomentSpec::means() const {
  std::vector<double> out;
  out.reserve(n());
  for (std::size_t i = 0; i < n(); ++i) out.push_back(mean(i));
  return out;
}

double MomentSpec::mean_sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i) s += mean(i);
  return s;
}

double MomentSpec::moment(std::size_t i, std::size_t k) const {
  if (k == 0) return 1.0;
  const auto& m = moments.at(i);
  if (k > m.size())
    throw DegreeExceedsMoments("moment of order " + std::to_string(k) +
                               " requested for variable " + std::to_string(i) +
                               " but only " + std::to_string(m.size()) +
                               " are fixed");
  return m[k - 1];
}

std::vector<std::vector<std::size_t>> MomentSpec::block_partition() const {
  if (!blocks.empty()) {
    auto b = blocks;
    for (auto& blk : b) std::sort(blk.begin(), blk.end());
    std::sort(b.begin(), b.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return b;
  }
  std::vector<std::vector<std::size_t>> out;
  std::map<std::vector<double>, std::size_t> index;
  for (std::size_t i = 0; i < n(); ++i) {
    auto [it, fresh] = index.try_emplace(moments[i], out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(i);
  }
  return out;
}

void MomentSpec::check_structure() const {
  support.check();
  if (moments.empty()) throw InvalidArgument("spec has no variables");
  for (const auto& m : moments) {
    if (m.empty()) throw InvalidArgument("every variable needs a first moment");
    for (double v : m)
      if (!std::isfinite(v)) throw InvalidArgument("moment values must be finite");
  }
  if (!blocks.empty()) {
    std::vector<int> seen(n(), 0);
    for (const auto& blk : blocks) {
      if (blk.empty()) throw InvalidArgument("empty block in partition");
      for (std::size_t i : blk) {
        if (i >= n()) throw InvalidArgument("block index out of range");
        if (seen[i]++) throw InvalidArgument("variable listed in two blocks");
        if (moments[i] != moments[blk.front()])
          throw InvalidArgument("moments differ within block");
      }
    }
    if (std::count(seen.begin(), seen.end(), 0) != 0)
      throw InvalidArgument("block partition does not cover every variable");
  }
}

double tail_threshold(const MomentSpec& spec, double t) {
  return double(spec.n()) * t + spec.mean_sum();
}

// ---------------------------------------------------------------------------

void Diagnostics::set(const std::string& key, double v) {
  for (auto& kv : values)
    if (kv.first == key) {
      kv.second = v;
      return;
    }
  values.emplace_back(key, v);
}

std::optional<double> Diagnostics::get(const std::string& key) const {
  for (const auto& kv : values)
    if (kv.first == key) return kv.second;
  return std::nullopt;
}

BoundResult BoundResult::make(std::string method, double value) {
  BoundResult r;
  r.method = std::move(method);
  r.value = value;
  return r;
}

double BoundResult::clamped() const {
  return std::clamp(value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

double DiscreteDistribution::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

double DiscreteDistribution::moment(std::size_t k) const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * std::pow(a.location, double(k));
  return s;
}

double DiscreteDistribution::expectation(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * f(a.location);
  return s;
}

void DiscreteDistribution::check(const SupportInterval& support) const {
  if (atoms.empty()) throw InvalidArgument("distribution has no atoms");
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0)) throw InvalidArgument("negative atom weight");
    if (!support.contains(a.location, 1e-12))
      throw InvalidArgument("atom at " + fmt(a.location) + " outside the support");
  }
  if (std::abs(total_weight() - 1.0) > 1e-12)
    throw InvalidArgument("atom weights sum to " + fmt(total_weight()));
}

double DiscreteDistribution::moment_error(std::span<const double> target) const {
  double e = 0.0;
  for (std::size_t k = 1; k <= target.size(); ++k)
    e = std::max(e, std::abs(moment(k) - target[k - 1]));
  return e;
}

DiscreteDistribution DiscreteDistribution::simplified() const {
  std::map<double, double> merged;
  for (const auto& a : atoms)
    if (a.weight != 0.0) merged[a.location] += a.weight;
  DiscreteDistribution d;
  for (const auto& [x, w] : merged) d.atoms.push_back({x, w});
  return d;
}

std::size_t ProductDistribution::outcome_count() const {
  std::size_t c = 1;
  for (const auto& f : factors) c *= f.atoms.size();
  return c;
}

void ProductDistribution::for_each_outcome(
    const std::function<void(std::span<const double>, double)>& visit) const {
  const std::size_t n = factors.size();
  if (n == 0) return;
  for (const auto& f : factors)
    if (f.atoms.empty()) return;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& a = factors[i].atoms[idx[i]];
      x[i] = a.location;
      p *= a.weight;
    }
    visit(x, p);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < factors[i].atoms.size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

double ProductDistribution::expectation(
    const std::function<double(std::span<const double>)>& f) const {
  double s = 0.0;
  for_each_outcome([&](std::span<const double> x, double p) { s += p * f(x); });
  return s;
}

// ---------------------------------------------------------------------------

ValidationReport validate_moments(const MomentSpec& spec, const ValidationOptions& opts) {
  spec.check_structure();
  const auto& sup = spec.support;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    const auto& m = spec.moments[i];
    const std::string who = "variable " + std::to_string(i) + ": ";
    if (!(m[0] > sup.lower && m[0] < sup.upper))
      return {false, who + "mean " + fmt(m[0]) + " must lie strictly inside (" +
                         fmt(sup.lower) + ", " + fmt(sup.upper) + ")"};
    if (m.size() < 2) continue;
    if (sup.bounded()) {
      AffineMap map{sup.lower, sup.width()};
      auto u = map.moments_to_unit(std::span<const double>(m.data(), 2));
      if (u[1] < u[0] * u[0] - opts.tol)
        return {false, who + "second moment below squared mean (mu2 >= mu1^2)"};
      if (u[1] > u[0] + opts.tol)
        return {false, who + "second moment above mean on the unit support (mu2 <= mu1)"};
    } else {
      if (m[1] < m[0] * m[0] - opts.tol)
        return {false, who + "second moment below squared mean (mu2 >= mu1^2)"};
    }
  }
  if (opts.lp_feasibility) {
    for (std::size_t i = 0; i < spec.n(); ++i) {
      if (!oracle::moments_feasible_lp(spec.support, spec.moments[i], opts.lp_grid_points))
        return {false, "variable " + std::to_string(i) +
                           ": no distribution on the grid matches the moments"};
    }
  }
  return {};
}

void validate_moments_or_throw(const MomentSpec& spec, const ValidationOptions& opts) {
  auto r = validate_moments(spec, opts);
  if (!r.ok) throw MomentInfeasible(r.violated);
}

std::vector<double> affine_moments(std::span<const double> m, double a, double w) {
  // E[(a + wY)^k] = sum_j C(k,j) w^j a^(k-j) E[Y^j]
  std::vector<double> out(m.size());
  for (std::size_t k = 1; k <= m.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double ey = j == 0 ? 1.0 : m[j - 1];
      s += binom(k, j) * std::pow(w, double(j)) * std::pow(a, double(k - j)) * ey;
    }
    out[k - 1] = s;
  }
  return out;
}

std::vector<double> AffineMap::moments_to_unit(std::span<const double> m) const {
  // Y = (X - offset)/scale = -offset/scale + X/scale
  if (is_identity()) return {m.begin(), m.end()};
  return affine_moments(m, -offset / scale, 1.0 / scale);
}

std::vector<double> AffineMap::moments_from_unit(std::span<const double> m) const {
  if (is_identity()) return {m.begin(), m.end()};
  return affine_moments(m, offset, scale);
}

NormalizedSpec normalize_support(const MomentSpec& spec) {
  spec.support.check();
  if (!spec.support.bounded())
    throw UnboundedSupport("normalize_support needs both endpoints finite");
  NormalizedSpec out;
  out.map = AffineMap{spec.support.lower, spec.support.width()};
  out.spec = spec;
  out.spec.support = SupportInterval::unit();
  for (auto& m : out.spec.moments) m = out.map.moments_to_unit(m);
  return out;
}

}  // namespace concbound
