// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/sos_bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>

#include "parallel.hpp"

namespace concbound::sos {

using poly::MultiIndex;
using poly::Polynomial;

std::string to_string(ObjectiveMode m) {
  return m == ObjectiveMode::exact ? "exact" : "rank1";
}

ObjectiveMode parse_objective_mode(const std::string& s) {
  if (s == "exact") return ObjectiveMode::exact;
  if (s == "rank1") return ObjectiveMode::rank1;
  throw InvalidArgument("unknown objective mode '" + s + "'");
}

// ---------------------------------------------------------------------------

poly::SemialgebraicSet SosCertificate::support_set() const {
  return poly::box(nvars, -1.0, 1.0);
}

poly::SemialgebraicSet SosCertificate::tail_set() const {
  poly::SemialgebraicSet s;
  Polynomial h = Polynomial::constant(nvars, -threshold);
  for (std::size_t i = 0; i < nvars; ++i) h = h + Polynomial::variable(nvars, i);
  s.inequalities.push_back(h);
  for (auto& b : poly::box(nvars, -1.0, 1.0).inequalities) s.inequalities.push_back(b);
  return s;
}

namespace {

double sos_value(const CertificateBlock& b, std::span<const double> y) {
  const std::size_t k = b.basis.size();
  Eigen::VectorXd m(k);
  for (std::size_t a = 0; a < k; ++a) m(a) = Polynomial::monomial(b.basis[a]).eval(y);
  return m.dot(b.gram * m);
}

double identity_residual(const SosCertificate& c, const std::string& side,
                         const poly::SemialgebraicSet& set, double shift,
                         std::span<const double> y) {
  double rhs = 0.0;
  for (const auto& b : c.blocks) {
    if (b.side != side) continue;
    const double h = b.multiplier < 0 ? 1.0 : set.inequalities.at(b.multiplier).eval(y);
    rhs += sos_value(b, y) * h;
  }
  return c.decision_polynomial.eval(y) - shift - rhs;
}

}  // namespace

double SosCertificate::lower_identity_residual(std::span<const double> y) const {
  return identity_residual(*this, "lower", tail_set(), 1.0, y);
}

double SosCertificate::nonneg_identity_residual(std::span<const double> y) const {
  return identity_residual(*this, "nonneg", support_set(), 0.0, y);
}

std::string SosCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["coordinates"] = {{"center", center}, {"half_width", half_width},
                      {"tail_threshold", threshold}, {"nvars", nvars}};
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < decision_basis.size(); ++i)
    coeffs.push_back({{"monomial", poly::to_string(decision_basis[i])},
                      {"exponents", decision_basis[i]},
                      {"value", coefficients[i]}});
  j["decision_coefficients"] = coeffs;
  j["decision_polynomial"] = decision_polynomial.to_string();
  nlohmann::ordered_json blks = nlohmann::ordered_json::array();
  for (const auto& b : blocks) {
    nlohmann::ordered_json g = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < b.gram.rows(); ++r) {
      std::vector<double> row(b.gram.cols());
      for (Eigen::Index c = 0; c < b.gram.cols(); ++c) row[c] = b.gram(r, c);
      g.push_back(row);
    }
    std::vector<std::string> basis;
    for (const auto& m : b.basis) basis.push_back(poly::to_string(m));
    blks.push_back({{"side", b.side}, {"multiplier", b.multiplier}, {"weight", b.weight},
                    {"basis", basis}, {"gram", g}});
  }
  j["gram_blocks"] = blks;
  j["reconstruction_residual"] = reconstruction_residual;
  j["min_gram_eigenvalue"] = min_gram_eigenvalue;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::pair<BoundResult, SosCertificate> sos_bound(const SosBoundRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  const MomentSpec& spec = req.spec;
  spec.check_structure();
  const std::size_t n = spec.n();
  const int a = static_cast<int>(spec.order());
  const int d = req.degree;
  const int r = req.level;
  if (d < 0) throw InvalidArgument("polynomial degree must be >= 0");
  if (!(req.t >= 0.0)) throw DomainError("deviation t must be >= 0");
  const int need = req.mode == ObjectiveMode::exact ? (d + 1) / 2 : d;
  if (r < need)
    throw DegreeMismatch("level r = " + std::to_string(r) + " is too low for degree " +
                         std::to_string(d) + " (need r >= " + std::to_string(need) + ")");

  // Transport the (truncated) support to [-1, 1].
  std::vector<std::string> warnings;
  double lo = spec.support.lower;
  const double hi = spec.support.upper;
  const bool truncated = !(lo > -kInf);
  if (truncated) {
    if (!(req.truncation_radius > 0.0))
      throw InvalidArgument("truncation radius must be positive");
    lo = -req.truncation_radius;
    if (!(lo < hi)) throw InvalidArgument("truncation radius leaves an empty support");
  }
  validate_moments_or_throw(spec);
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  MomentSpec ys = spec;
  ys.support = SupportInterval::symmetric();
  for (auto& m : ys.moments) m = affine_moments(m, -c / h, 1.0 / h);
  const double thr = (tail_threshold(spec, req.t) - double(n) * c) / h;
  if (thr > double(n) + 1e-12)
    throw EmptyTail("tail set is empty: threshold exceeds the support");

  // Decision columns.
  const auto basis = poly::monomials_up_to(n, d, a);
  std::vector<double> sigma;
  for (const auto& k : basis) sigma.push_back(poly::monomial_moment(k, ys));
  poly::PutinarSpec ps;
  ps.nvars = n;
  ps.fixed_target = Polynomial(n);
  ps.level = r;
  if (req.mode == ObjectiveMode::exact) {
    for (std::size_t i = 0; i < basis.size(); ++i)
      ps.decision.push_back({basis[i], 1.0, sigma[i]});
  } else {
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i; j < basis.size(); ++j) {
        MultiIndex k(n);
        for (std::size_t v = 0; v < n; ++v) k[v] = basis[i][v] + basis[j][v];
        const double mult = i == j ? 1.0 : 2.0;
        ps.decision.push_back({k, mult, mult * sigma[i] * sigma[j]});
      }
  }

  SosCertificate cert;
  cert.center = c;
  cert.half_width = h;
  cert.threshold = std::max(thr, -double(n));
  cert.nvars = n;
  ps.lower_on = cert.tail_set();
  ps.nonneg_on = cert.support_set();
  poly::PutinarProgram prog(ps);

  const sdp::ConicSolution sol = sdp::solve(prog.conic(), req.tolerances);
  BoundResult res = BoundResult::make("sos", 0.0);
  res.diagnostics.iterations = sol.iterations;
  res.diagnostics.primal_residual = sol.residuals.primal;
  res.diagnostics.dual_residual = sol.residuals.dual;
  res.diagnostics.gap = sol.residuals.gap;
  switch (sol.status) {
    case sdp::Status::optimal: break;
    case sdp::Status::infeasible:
      throw InfeasibleHierarchyLevel("no certificate at level r = " + std::to_string(r) +
                                     "; try a higher level");
    case sdp::Status::unbounded:
      throw SolverFailure("SoS program is unbounded below (objective mode " +
                              to_string(req.mode) + ")",
                          "unbounded");
    case sdp::Status::numerical_limit:
      throw SolverFailure("SDP solver stopped at its numerical limit", "numerical_limit");
  }

  const poly::SolvedPutinar solved = prog.reconstruct(sol);
  const double value = sol.primal_objective + prog.objective_offset();
  res.value = std::max(value, 0.0);
  res.diagnostics.set("raw_objective", value);
  res.diagnostics.set("dual_objective", sol.dual_objective + prog.objective_offset());
  res.diagnostics.set("reconstruction_residual", solved.reconstruction_residual);
  res.diagnostics.set("min_gram_eigenvalue", solved.min_gram_eigenvalue);
  res.diagnostics.set("level", r);
  res.diagnostics.set("degree", d);

  cert.decision_polynomial = solved.decision_polynomial;
  if (req.mode == ObjectiveMode::exact) {
    cert.decision_basis = basis;
    cert.coefficients = solved.q;
  } else {
    for (const auto& [k, v] : solved.decision_polynomial.terms()) {
      cert.decision_basis.push_back(k);
      cert.coefficients.push_back(v);
    }
  }
  for (std::size_t kb = 0; kb < prog.blocks().size(); ++kb) {
    const auto& blk = prog.blocks()[kb];
    cert.blocks.push_back({blk.side == poly::Side::lower ? "lower" : "nonneg", blk.multiplier,
                           blk.weight.to_string(), blk.basis, solved.grams[kb]});
  }
  cert.reconstruction_residual = solved.reconstruction_residual;
  cert.min_gram_eigenvalue = solved.min_gram_eigenvalue;

  if (truncated) {
    // Q close to zero somewhere on a truncation face means the cut at -R
    // is shaping the certificate.
    double qmin = kInf;
    const int steps = 200;
    std::vector<double> y(n, 0.0);
    for (std::size_t face = 0; face < n; ++face)
      for (int s = 0; s <= steps; ++s) {
        for (std::size_t v = 0; v < n; ++v) y[v] = -1.0 + 2.0 * s / steps;
        y[face] = -1.0;
        qmin = std::min(qmin, cert.decision_polynomial.eval(y));
      }
    res.diagnostics.set("min_Q_on_truncation_face", qmin);
    if (qmin < 1e-6)
      warnings.push_back("certificate touches the truncation boundary x = -R; "
                         "check stability in R");
  }
  res.diagnostics.warnings = warnings;
  res.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {res, cert};
}

std::pair<BoundResult, SosCertificate> bernstein_sos(double mu1, double mu2, double t,
                                                     int r, ObjectiveMode mode) {
  SosBoundRequest req;
  req.spec = MomentSpec::iid(2, SupportInterval::symmetric(), {mu1, mu2});
  req.t = t;
  req.degree = 2;
  req.level = r;
  req.mode = mode;
  auto out = sos_bound(req);
  out.first.method = "sos";
  return out;
}

std::pair<BoundResult, SosCertificate> bennett_sos(double mu1, double mu2, double t, int r,
                                                   double R, ObjectiveMode mode) {
  SosBoundRequest req;
  req.spec = MomentSpec::iid(2, SupportInterval{-kInf, 1.0}, {mu1, mu2});
  req.t = t;
  req.degree = 2;
  req.level = r;
  req.mode = mode;
  req.truncation_radius = R;
  auto out = sos_bound(req);
  out.first.method = "sos";
  return out;
}

Mu2GridResult hoeffding_mu2_grid(double mu1, double t, int r, std::size_t grid_size,
                                 GridAggregate agg, ObjectiveMode mode, unsigned threads) {
  if (!(mu1 > 0.0 && mu1 < 1.0)) throw DomainError("mu1 must lie in (0,1)");
  if (grid_size < 2) throw InvalidArgument("mu2 grid needs at least 2 points");
  const double lo = mu1 * mu1, hi = mu1;
  std::vector<double> grid(grid_size), vals(grid_size, kInf);
  std::vector<std::string> errs(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i)
    grid[i] = i + 1 == grid_size ? hi : lo + (hi - lo) * double(i) / double(grid_size - 1);

  detail::parallel_for(
      grid_size,
      [&](std::size_t i) {
        SosBoundRequest req;
        req.spec = MomentSpec::iid(2, SupportInterval::unit(), {mu1, grid[i]});
        req.t = t;
        req.degree = 2;
        req.level = r;
        req.mode = mode;
        try {
          vals[i] = sos_bound(req).first.value;
        } catch (const EmptyTail&) {
          vals[i] = 0.0;
        } catch (const Error& e) {
          errs[i] = e.what();
        }
      },
      threads);

  Mu2GridResult out;
  out.result = BoundResult::make("sos-mu2-grid", 0.0);
  std::size_t best = grid_size;
  for (std::size_t i = 0; i < grid_size; ++i) {
    if (!errs[i].empty()) {
      out.result.diagnostics.warnings.push_back("mu2 = " + std::to_string(grid[i]) +
                                                ": " + errs[i]);
      continue;
    }
    out.curve.emplace_back(grid[i], vals[i]);
    if (best == grid_size ||
        (agg == GridAggregate::min ? vals[i] < vals[best] : vals[i] > vals[best]))
      best = i;
  }
  if (best == grid_size)
    throw SolverFailure("every mu2 grid point failed", "numerical_limit");
  out.result.value = vals[best];
  out.selected_mu2 = grid[best];
  out.result.diagnostics.set("selected_mu2", grid[best]);
  out.result.diagnostics.set("grid_size", double(grid_size));
  if (!out.result.diagnostics.warnings.empty()) out.result.diagnostics.status = "partial";
  return out;
}

}  // namespace concbound::sos
