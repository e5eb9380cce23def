// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "concbound/core.hpp"
#include "concbound/sdp.hpp"

namespace concbound::poly {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& k);
std::string to_string(const MultiIndex& k);  // e.g. "x1^2*x2", "1"

// Graded lexicographic: lower total degree first; ties broken so that x1^2
// precedes x1*x2 precedes x2^2.
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

// All monomials of total degree <= d in n variables, graded-lex ordered,
// optionally with every exponent <= per_var_cap.
std::vector<MultiIndex> monomials_up_to(std::size_t n, int d, int per_var_cap = -1);

class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double, GradedLex>;

  explicit Polynomial(std::size_t nvars = 1) : nvars_(nvars) {}
  static Polynomial constant(std::size_t nvars, double c);
  static Polynomial variable(std::size_t nvars, std::size_t i);
  static Polynomial monomial(const MultiIndex& k, double c = 1.0);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  double coeff(const MultiIndex& k) const;
  // Adds to a coefficient; exact zeros are dropped.
  void add_term(const MultiIndex& k, double c);

  int degree() const;                  // -1 for the zero polynomial
  int degree_in(std::size_t var) const;
  bool is_zero() const { return terms_.empty(); }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }
  bool operator==(const Polynomial& o) const = default;

  double eval(std::span<const double> x) const;
  // Substitutes x_i = scale[i] * y_i + offset[i].
  Polynomial compose_affine(std::span<const double> scale,
                            std::span<const double> offset) const;
  double max_abs_coeff() const;
  std::string to_string() const;

 private:
  void require_same_arity(const Polynomial& o) const;
  std::size_t nvars_;
  Terms terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// sum_k p_k prod_i E[X_i^{k_i}] under independence.
double independent_expectation(const Polynomial& p, const MomentSpec& spec);
// Price of a single monomial: prod_i mu_i^{(k_i)}.
double monomial_moment(const MultiIndex& k, const MomentSpec& spec);

struct SemialgebraicSet {
  std::vector<Polynomial> inequalities;  // h_j(x) >= 0
};

// Box [lo, hi]^n as per-coordinate pairs x_i - lo >= 0, hi - x_i >= 0.
SemialgebraicSet box(std::size_t n, double lo, double hi);

// ---------------------------------------------------------------------------
// Putinar-type certificate programs.
//
// The target is T(x) + sum_c m_c q_c x^{k_c}, with T fixed and q free
// decision variables. The program requests
//   target - 1 = s_0 + sum_j s_j h_j   (on lower_on, when present)
//   target     = p_0 + sum_j p_j w_j   (on nonneg_on, when present)
// with every s, p a sum of squares of degree <= 2r, represented by a PSD Gram
// matrix over the monomials of degree <= r - ceil(deg(h)/2).
// ---------------------------------------------------------------------------

struct DecisionColumn {
  MultiIndex monomial;
  double multiplicity = 1.0;
  double price = 0.0;  // objective weight of q_c
};

struct PutinarSpec {
  std::size_t nvars = 1;
  Polynomial fixed_target{1};
  std::vector<DecisionColumn> decision;
  std::optional<SemialgebraicSet> lower_on;
  std::optional<SemialgebraicSet> nonneg_on;
  int level = 1;
};

enum class Side { lower, nonneg };

struct GramBlock {
  Side side = Side::lower;
  int multiplier = -1;  // -1 for the free SoS term, else index into the set
  Polynomial weight{1};
  std::vector<MultiIndex> basis;
};

struct SolvedPutinar {
  Polynomial decision_polynomial{1};  // sum_c m_c q_c x^{k_c}
  std::vector<double> q;               // one per decision column
  std::vector<Eigen::MatrixXd> grams;  // one per GramBlock
  double objective = 0.0;
  double reconstruction_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
};

class PutinarProgram {
 public:
  // Throws DegreeMismatch when the target or a constraint cannot be matched
  // at level r.
  explicit PutinarProgram(PutinarSpec spec);

  const PutinarSpec& spec() const { return spec_; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  const std::vector<GramBlock>& blocks() const { return blocks_; }
  std::vector<std::size_t> block_sizes() const;
  // Decision variables are eliminated through the nonneg side when every
  // decision monomial appears in exactly one unit-multiplicity column.
  bool eliminated() const { return eliminated_; }
  const sdp::ConicProgram& conic() const { return conic_; }
  // Label of each equality row: side and matched monomial.
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  double objective_offset() const { return offset_; }

  SolvedPutinar reconstruct(const sdp::ConicSolution& sol) const;
  // Max abs coefficient of (target - 1 - s_0 - sum s_j h_j) and
  // (target - p_0 - sum p_j w_j) for the given pieces.
  double residual(const std::vector<double>& q,
                  const std::vector<Eigen::MatrixXd>& grams) const;
  // sum over Gram blocks of a given side: sum_ab G_ab b_a b_b * weight.
  Polynomial side_expansion(Side side, const std::vector<Eigen::MatrixXd>& grams) const;

 private:
  void build();
  std::size_t block_var_offset(std::size_t k) const;

  PutinarSpec spec_;
  std::vector<MultiIndex> monomials_;
  std::map<MultiIndex, std::size_t, GradedLex> mono_index_;
  std::vector<GramBlock> blocks_;
  bool eliminated_ = false;
  std::size_t n_free_ = 0;  // orthant variables used for decision columns
  sdp::ConicProgram conic_;
  std::vector<std::string> row_labels_;
  double offset_ = 0.0;
};

// Feasibility program for a fixed target polynomial.
PutinarProgram assemble_putinar(const Polynomial& target,
                                std::optional<SemialgebraicSet> lower_on,
                                std::optional<SemialgebraicSet> nonneg_on, int r);

}  // namespace concbound::poly
