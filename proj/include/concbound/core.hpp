// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace concbound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class MomentInfeasible : public Error {
 public:
  using Error::Error;
};

class UnboundedSupport : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyTail : public Error {
 public:
  using Error::Error;
};

class DegreeExceedsMoments : public Error {
 public:
  using Error::Error;
};

class DegreeMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleHierarchyLevel : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::string status)
      : Error(what), status_(std::move(status)) {}
  const std::string& status() const noexcept { return status_; }

 private:
  std::string status_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct SupportInterval {
  double lower = 0.0;
  double upper = 1.0;

  static SupportInterval unit() { return {0.0, 1.0}; }
  static SupportInterval symmetric() { return {-1.0, 1.0}; }

  bool bounded() const { return lower > -kInf && upper < kInf; }
  double width() const { return upper - lower; }
  bool contains(double x, double tol = 0.0) const {
    return x >= lower - tol && x <= upper + tol;
  }
  // Throws InvalidArgument when lower >= upper, upper is +inf, or NaN.
  void check() const;
};

// Moments of X_1..X_n. moments[i][k-1] holds E[X_i^k], k = 1..a.
// `blocks` is an optional partition into groups with identical moments; when
// empty it is derived by grouping identical moment vectors.
struct MomentSpec {
  SupportInterval support;
  std::vector<std::vector<double>> moments;
  std::vector<std::vector<std::size_t>> blocks;

  static MomentSpec iid(std::size_t n, SupportInterval support,
                        std::vector<double> per_variable);
  static MomentSpec from_means(std::vector<double> means,
                               SupportInterval support = SupportInterval::unit());

  std::size_t n() const { return moments.size(); }
  // Highest order fixed for every variable.
  std::size_t order() const;
  double mean(std::size_t i) const { return moments.at(i).at(0); }
  std::vector<double> means() const;
  double mean_sum() const;
  // Moment of order k (k = 0 gives 1). Throws DegreeExceedsMoments past order().
  double moment(std::size_t i, std::size_t k) const;
  // The block partition, derived when not given. Blocks are listed by first
  // member and members in ascending order.
  std::vector<std::vector<std::size_t>> block_partition() const;
  // Throws InvalidArgument on structural problems (sizes, NaN, partition).
  void check_structure() const;
};

// Tail threshold n*t + sum of means for the deviation query {sum x >= ...}.
double tail_threshold(const MomentSpec& spec, double t);

struct Diagnostics {
  std::string status = "optimal";
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> warnings;

  void set(const std::string& key, double v);
  std::optional<double> get(const std::string& key) const;
};

struct BoundResult {
  std::string method;
  double value = 1.0;
  Diagnostics diagnostics;
  std::optional<std::string> certificate_id;

  static BoundResult make(std::string method, double value);
  double clamped() const;
};

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

struct DiscreteDistribution {
  std::vector<Atom> atoms;

  double total_weight() const;
  double moment(std::size_t k) const;
  double expectation(const std::function<double(double)>& f) const;
  // Throws InvalidArgument on negative weights, weight sum off by more than
  // 1e-12, or atoms outside the support.
  void check(const SupportInterval& support) const;
  // Max abs difference between realized and target moments of orders 1..a.
  double moment_error(std::span<const double> target) const;
  // Merge atoms at identical locations, drop zero weights, sort by location.
  DiscreteDistribution simplified() const;
};

struct ProductDistribution {
  std::vector<DiscreteDistribution> factors;

  std::size_t n() const { return factors.size(); }
  std::size_t outcome_count() const;
  // Visits every joint outcome (locations, probability) in lexicographic atom
  // order. Exact for finite atoms.
  void for_each_outcome(
      const std::function<void(std::span<const double>, double)>& visit) const;
  double expectation(const std::function<double(std::span<const double>)>& f) const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct ValidationReport {
  bool ok = true;
  std::string violated;  // empty when ok
};

struct ValidationOptions {
  // Run the discretized LP feasibility check (needed for orders >= 3).
  bool lp_feasibility = false;
  std::size_t lp_grid_points = 2001;
  double tol = 1e-12;
};

// Order-1 interiority and order-2 mean/variance bounds transported to the
// actual support. Returns a report; validate_moments_or_throw raises
// MomentInfeasible with the violated inequality as message.
ValidationReport validate_moments(const MomentSpec& spec,
                                  const ValidationOptions& opts = {});
void validate_moments_or_throw(const MomentSpec& spec,
                               const ValidationOptions& opts = {});

// x -> (x - offset) / scale maps the support onto [0,1].
struct AffineMap {
  double offset = 0.0;
  double scale = 1.0;

  double to_unit(double x) const { return (x - offset) / scale; }
  double from_unit(double y) const { return offset + scale * y; }
  // Moments E[Y^k] of Y = to_unit(X) from those of X, and back.
  std::vector<double> moments_to_unit(std::span<const double> m) const;
  std::vector<double> moments_from_unit(std::span<const double> m) const;
  bool is_identity() const { return offset == 0.0 && scale == 1.0; }
};

struct NormalizedSpec {
  MomentSpec spec;
  AffineMap map;
};

NormalizedSpec normalize_support(const MomentSpec& spec);

// Moments of a + w*Y given moments of Y (orders 1..a), by binomial expansion.
std::vector<double> affine_moments(std::span<const double> m, double a, double w);

}  // namespace concbound
