// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "concbound/core.hpp"
#include "concbound/variational.hpp"

// Worst-case discrete distributions and exact checks of what they attain.
namespace concbound::extremal {

// {0 -> t/(mu+t), mu+t -> mu/(mu+t)}; a single atom at mu when t = 0.
DiscreteDistribution extremal_exact_univariate(double mu, double t);

// (1-mu) delta_0 + mu delta_1.
DiscreteDistribution extremal_bernoulli(double mu);

// Product of per-variable Bernoulli factors; order-1 spec on [0,1].
ProductDistribution extremal_product(const MomentSpec& spec);

enum class BoundKind { exact1, chernoff, variational };
std::string to_string(BoundKind k);
BoundKind parse_bound_kind(const std::string& s);

struct AttainmentParams {
  std::vector<double> means;
  double t = 0.0;
  // Variational only; solved from `means` when absent.
  std::optional<variational::AffineWitness> witness;
};

// E[F] is the tail probability P(sum x >= threshold); E[U] the expectation
// of the majorant whose mean defines the bound.
struct AttainmentReport {
  BoundKind kind = BoundKind::exact1;
  double threshold = 0.0;
  double bound = 0.0;
  double expected_indicator = 0.0;
  double expected_relaxed = 0.0;
  double gap_indicator = 0.0;  // bound - E[F]
  double gap_relaxed = 0.0;    // |bound - E[U]|
  bool attains_indicator = false;
  bool attains_relaxed = false;
  std::string majorant;

  std::string to_json() const;
};

AttainmentReport attainment_report(const ProductDistribution& dist, BoundKind kind,
                                   const AttainmentParams& params, double tol = 1e-12);

std::string to_json(const DiscreteDistribution& d);
std::string to_json(const ProductDistribution& d);

}  // namespace concbound::extremal
