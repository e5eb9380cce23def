// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "concbound/core.hpp"
#include "concbound/polynomial.hpp"
#include "concbound/sdp.hpp"

// Polynomial upper bounds: minimize E[Q(X)] over polynomials Q with Q >= 1 on
// the tail set and Q >= 0 on the support box, certified by Putinar-type
// sum-of-squares representations at level r.
namespace concbound::sos {

enum class ObjectiveMode {
  exact,  // Q over monomials with per-variable degree <= a, priced exactly
  rank1,  // Q = m(x)' G m(x) with G free, priced by Tr(G sigma sigma')
};

std::string to_string(ObjectiveMode m);
ObjectiveMode parse_objective_mode(const std::string& s);

struct SosBoundRequest {
  MomentSpec spec;
  double t = 0.0;
  int degree = 2;
  int level = 2;
  ObjectiveMode mode = ObjectiveMode::exact;
  double truncation_radius = 10.0;  // used when the support is unbounded below
  sdp::Tolerances tolerances{1e-9, 1e-9, 300};
};

struct CertificateBlock {
  std::string side;  // "lower" (Q - 1 on the tail set) or "nonneg" (Q on the box)
  int multiplier = -1;
  std::string weight;  // h_j as text, "1" for the free term
  std::vector<poly::MultiIndex> basis;
  Eigen::MatrixXd gram;
};

// All polynomials are expressed in the scaled variables y_i = (x_i - c) / h,
// which map the (truncated) support onto [-1, 1].
struct SosCertificate {
  double center = 0.0;
  double half_width = 1.0;
  double threshold = 0.0;  // tail set is {sum y_i >= threshold} in [-1,1]^n
  std::size_t nvars = 0;
  poly::Polynomial decision_polynomial{1};
  std::vector<poly::MultiIndex> decision_basis;
  std::vector<double> coefficients;
  std::vector<CertificateBlock> blocks;
  double reconstruction_residual = 0.0;
  double min_gram_eigenvalue = 0.0;

  poly::SemialgebraicSet tail_set() const;
  poly::SemialgebraicSet support_set() const;
  // Q - 1 - sum_j s_j h_j evaluated at y (should vanish identically).
  double lower_identity_residual(std::span<const double> y) const;
  double nonneg_identity_residual(std::span<const double> y) const;
  std::string to_json() const;
};

std::pair<BoundResult, SosCertificate> sos_bound(const SosBoundRequest& req);

// n = 2, d = 2 on [-1,1]^2 with per-variable moments (mu1, mu2).
std::pair<BoundResult, SosCertificate> bernstein_sos(
    double mu1, double mu2, double t, int r, ObjectiveMode mode = ObjectiveMode::exact);

// n = 2, d = 2 on (-inf, 1]^2 truncated to [-R, 1]^2.
std::pair<BoundResult, SosCertificate> bennett_sos(
    double mu1, double mu2, double t, int r, double R = 10.0,
    ObjectiveMode mode = ObjectiveMode::exact);

enum class GridAggregate { min, max };

struct Mu2GridResult {
  BoundResult result;
  double selected_mu2 = 0.0;
  std::vector<std::pair<double, double>> curve;  // (mu2, value)
};

// Scans mu2 uniformly over [mu1^2, mu1] for n = 2 iid on [0,1] with d = 2 and
// aggregates the SoS values (default: minimum).
Mu2GridResult hoeffding_mu2_grid(double mu1, double t, int r, std::size_t grid_size = 41,
                                 GridAggregate agg = GridAggregate::min,
                                 ObjectiveMode mode = ObjectiveMode::exact,
                                 unsigned threads = 0);

}  // namespace concbound::sos
