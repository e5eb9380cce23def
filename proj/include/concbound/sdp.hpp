// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

// Dense primal-dual interior point solver for
//
//   minimize c'x  subject to  A x = b,  x in K,
//
// K = R^l_+ x S^k1_+ x ... x S^kp_+. Each PSD block is stored as svec: the
// lower triangle in column-major order with off-diagonals scaled by sqrt(2),
// so that svec(X)'svec(Y) = trace(XY).
namespace concbound::sdp {

struct ConeStructure {
  std::size_t nonneg = 0;
  std::vector<std::size_t> psd;

  std::size_t dim() const;
  // Barrier degree: nonneg + sum of block sides.
  std::size_t degree() const;
};

inline constexpr std::size_t svec_size(std::size_t k) { return k * (k + 1) / 2; }
std::size_t svec_index(std::size_t k, std::size_t i, std::size_t j);
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, std::size_t k);

struct ConicProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ConeStructure cones;

  std::size_t num_vars() const { return static_cast<std::size_t>(c.size()); }
  std::size_t num_rows() const { return static_cast<std::size_t>(b.size()); }
  // Offset of PSD block `k` inside the variable vector.
  std::size_t psd_offset(std::size_t k) const;
  // Adds coef * X_ij of PSD block `k` to row `row`, where X_ij is one entry of
  // the full symmetric matrix. Calling it for (i,j) and (j,i) adds both.
  void add_psd_entry(std::size_t row, std::size_t k, std::size_t i, std::size_t j,
                     double coef);
  // Same for the objective.
  void add_psd_objective(std::size_t k, std::size_t i, std::size_t j, double coef);
  // Throws InvalidArgument on inconsistent dimensions.
  void check() const;
};

// JSON dump: {"objective": [...], "rows": [[i, j, v], ...], "rhs": [...],
// "cones": {"nonneg": l, "psd": [...]}}.
std::string to_json(const ConicProgram& p);

struct Tolerances {
  double feasibility = 1e-8;
  double gap = 1e-8;
  int max_iterations = 300;
};

enum class Status { optimal, infeasible, unbounded, numerical_limit };
std::string to_string(Status s);

struct Residuals {
  double primal = 0.0;  // |Ax - b| / (1 + |b|)
  double dual = 0.0;    // |A'y + s - c| / (1 + |c|)
  double gap = 0.0;     // |c'x - b'y| / (1 + |c'x| + |b'y|)
  double max() const;
};

struct ConicSolution {
  Status status = Status::numerical_limit;
  Eigen::VectorXd x, y, s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
  std::vector<std::size_t> removed_rows;
  // Smallest eigenvalue / entry of x and s over all cones.
  double min_cone_x = 0.0;
  double min_cone_s = 0.0;
};

// Residuals recomputed from scratch for the given point.
Residuals kkt_residuals(const ConicProgram& p, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, const Eigen::VectorXd& s);

// Minimum eigenvalue (or entry) of v over all cone blocks.
double cone_min(const ConeStructure& k, const Eigen::VectorXd& v);

ConicSolution solve(const ConicProgram& p, const Tolerances& tol = {});
// Same method restricted to programs without PSD blocks.
ConicSolution solve_lp(const ConicProgram& p, const Tolerances& tol = {});

}  // namespace concbound::sdp
