// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "concbound/core.hpp"

// Product-function bounds inf prod_i (alpha_i + beta_i mu_i) over affine
// factors whose product is >= 1 on the tail polytope
// {x in [0,1]^n : sum x_i >= s}.
namespace concbound::variational {

// A vertex of the tail polytope up to permutations inside each block: per
// block the number of coordinates at 0 and at 1, plus at most one fractional
// coordinate (in block `frac_block`).
struct BlockVertex {
  std::vector<std::size_t> zeros;
  std::vector<std::size_t> ones;
  int frac_block = -1;
  double frac = 0.0;

  bool operator==(const BlockVertex&) const = default;
};

struct ExtremalPointSet {
  double threshold = 0.0;
  std::vector<std::size_t> block_sizes;
  // Variable indices of each block; defaults to consecutive ranges.
  std::vector<std::vector<std::size_t>> members;
  std::vector<BlockVertex> vertices;

  std::size_t size() const { return vertices.size(); }
  std::size_t n() const;
  // Expanded coordinates: values sorted ascending within each block and
  // written to the block's members in order.
  std::vector<double> point(std::size_t v) const;
  std::vector<std::vector<double>> points() const;
};

// Snaps s to an integer when within 1e-12 * max(1, n).
double snap_threshold(double s, std::size_t n);

// All vertices of {x in [0,1]^n : sum x >= s} for the given block sizes.
// Throws EmptyTail when s > n.
ExtremalPointSet enumerate_extremal(std::vector<std::size_t> block_sizes, double s);
ExtremalPointSet enumerate_extremal_iid(std::size_t n, double s);
// First m variables have mean mu1, the remaining n - m have mean mu2.
ExtremalPointSet enumerate_extremal_two_block(std::size_t n, std::size_t m, double mu1,
                                              double mu2, double t);

struct AffineWitness {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::string scale_note;

  // sum_i log(alpha_i + beta_i x_i); -inf when a factor is <= 0.
  double log_product(std::span<const double> x) const;
  double value(std::span<const double> means) const;
};

// The product-form bound and a witness normalized so that the binding
// vertex has product exactly 1. Diagnostics carry "convex_objective" (the
// log-barrier program's optimal value) and "exp_convex_objective".
std::pair<BoundResult, AffineWitness> solve_variational(const MomentSpec& spec, double t);

// Two-variable closed form. `alpha`, `beta` are the verified optimum; the
// printed_* fields carry the alternative expressions for comparison.
struct ClosedFormN2 {
  int regime = 1;
  double alpha = 1.0;
  double beta = 0.0;
  double value = 1.0;
  double printed_alpha = 1.0;
  double printed_beta = 0.0;
  double printed_value = 1.0;
};

ClosedFormN2 closed_form_n2(double mu, double t);

// Exact scale-invariant objective prod (alpha + beta mu)^m / exp(min over
// vertices of sum log(alpha + beta x)) for block-constant coefficients.
double product_objective(const ExtremalPointSet& pts, std::span<const double> means,
                         std::span<const double> alpha, std::span<const double> beta);

// (1/n) |log rho_var - n log rho_1|, with rho_1 the single-variable Chernoff
// value.
double variational_gap_to_chernoff(std::size_t n, double mu, double t);

}  // namespace concbound::variational
