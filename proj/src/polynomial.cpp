// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "concbound/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace concbound::poly {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int total_degree(const MultiIndex& k) { return std::accumulate(k.begin(), k.end(), 0); }

std::string to_string(const MultiIndex& k) {
  std::string s;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (k[i] > 1) s += "^" + std::to_string(k[i]);
  }
  return s.empty() ? "1" : s;
}

bool GradedLex::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<MultiIndex> monomials_up_to(std::size_t n, int d, int per_var_cap) {
  std::vector<MultiIndex> out;
  if (d < 0) return out;
  MultiIndex cur(n, 0);
  // Enumerate all exponent vectors with sum <= d by recursion on position.
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    const int hi = per_var_cap >= 0 ? std::min(left, per_var_cap) : left;
    for (int e = 0; e <= hi; ++e) {
      cur[pos] = e;
      self(self, pos + 1, left - e);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, d);
  std::sort(out.begin(), out.end(), GradedLex{});
  return out;
}

// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(MultiIndex(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  MultiIndex k(nvars, 0);
  k.at(i) = 1;
  return monomial(k);
}

Polynomial Polynomial::monomial(const MultiIndex& k, double c) {
  Polynomial p(k.size());
  p.add_term(k, c);
  return p;
}

double Polynomial::coeff(const MultiIndex& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& k, double c) {
  if (k.size() != nvars_) throw InvalidArgument("monomial arity mismatch");
  if (c == 0.0) return;
  auto [it, fresh] = terms_.try_emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, total_degree(k));
  return d;
}

int Polynomial::degree_in(std::size_t var) const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.at(var));
  return d;
}

void Polynomial::require_same_arity(const Polynomial& o) const {
  if (o.nvars_ != nvars_) throw InvalidArgument("polynomial arity mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require_same_arity(o);
  Polynomial r = *this;
  for (const auto& [k, c] : o.terms_) r.add_term(k, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  require_same_arity(o);
  Polynomial r = *this;
  for (const auto& [k, c] : o.terms_) r.add_term(k, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require_same_arity(o);
  Polynomial r(nvars_);
  MultiIndex k(nvars_);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) {
      for (std::size_t i = 0; i < nvars_; ++i) k[i] = ka[i] + kb[i];
      r.add_term(k, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(nvars_);
  for (const auto& [k, c] : terms_) r.add_term(k, c * s);
  return r;
}

double Polynomial::eval(std::span<const double> x) const {
  if (x.size() != nvars_) throw InvalidArgument("eval: point arity mismatch");
  double s = 0.0;
  for (const auto& [k, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int e = 0; e < k[i]; ++e) m *= x[i];
    s += m;
  }
  return s;
}

Polynomial Polynomial::compose_affine(std::span<const double> scale,
                                      std::span<const double> offset) const {
  if (scale.size() != nvars_ || offset.size() != nvars_)
    throw InvalidArgument("compose_affine: arity mismatch");
  std::vector<Polynomial> lin;
  for (std::size_t i = 0; i < nvars_; ++i)
    lin.push_back(variable(nvars_, i) * scale[i] + constant(nvars_, offset[i]));
  Polynomial r(nvars_);
  for (const auto& [k, c] : terms_) {
    Polynomial t = constant(nvars_, c);
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int e = 0; e < k[i]; ++e) t = t * lin[i];
    r = r + t;
  }
  return r;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    if (total_degree(k) > 0) os << "*" << poly::to_string(k);
  }
  return os.str();
}

// ---------------------------------------------------------------------------

double monomial_moment(const MultiIndex& k, const MomentSpec& spec) {
  if (k.size() != spec.n()) throw InvalidArgument("monomial arity differs from spec");
  double v = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (static_cast<std::size_t>(k[i]) > spec.moments[i].size())
      throw DegreeExceedsMoments("monomial " + to_string(k) + " needs E[x" +
                                 std::to_string(i + 1) + "^" + std::to_string(k[i]) +
                                 "] which is not fixed");
    v *= spec.moment(i, static_cast<std::size_t>(k[i]));
  }
  return v;
}

double independent_expectation(const Polynomial& p, const MomentSpec& spec) {
  double s = 0.0;
  for (const auto& [k, c] : p.terms()) s += c * monomial_moment(k, spec);
  return s;
}

SemialgebraicSet box(std::size_t n, double lo, double hi) {
  SemialgebraicSet s;
  for (std::size_t i = 0; i < n; ++i) {
    s.inequalities.push_back(Polynomial::variable(n, i) - Polynomial::constant(n, lo));
    s.inequalities.push_back(Polynomial::constant(n, hi) - Polynomial::variable(n, i));
  }
  return s;
}

// ---------------------------------------------------------------------------

PutinarProgram::PutinarProgram(PutinarSpec spec) : spec_(std::move(spec)) { build(); }

std::vector<std::size_t> PutinarProgram::block_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& b : blocks_) s.push_back(b.basis.size());
  return s;
}

std::size_t PutinarProgram::block_var_offset(std::size_t k) const {
  return conic_.psd_offset(k);
}

void PutinarProgram::build() {
  const std::size_t n = spec_.nvars;
  const int r = spec_.level;
  if (r < 0) throw DegreeMismatch("hierarchy level must be >= 0");
  if (spec_.fixed_target.nvars() != n) throw InvalidArgument("target arity mismatch");
  if (spec_.fixed_target.degree() > 2 * r)
    throw DegreeMismatch("target degree " + std::to_string(spec_.fixed_target.degree()) +
                         " exceeds 2r = " + std::to_string(2 * r));
  for (const auto& c : spec_.decision) {
    if (c.monomial.size() != n) throw InvalidArgument("decision monomial arity mismatch");
    if (total_degree(c.monomial) > 2 * r)
      throw DegreeMismatch("decision monomial " + to_string(c.monomial) +
                           " exceeds degree 2r = " + std::to_string(2 * r));
  }
  if (!spec_.lower_on && !spec_.nonneg_on)
    throw InvalidArgument("putinar program needs at least one set");

  monomials_ = monomials_up_to(n, 2 * r);
  for (std::size_t i = 0; i < monomials_.size(); ++i) mono_index_[monomials_[i]] = i;

  // Gram blocks: free SoS term first, then one per inequality.
  auto add_side = [&](Side side, const SemialgebraicSet& set) {
    blocks_.push_back({side, -1, Polynomial::constant(n, 1.0), monomials_up_to(n, r)});
    for (std::size_t j = 0; j < set.inequalities.size(); ++j) {
      const Polynomial& h = set.inequalities[j];
      if (h.nvars() != n) throw InvalidArgument("constraint arity mismatch");
      const int dh = std::max(h.degree(), 0);
      const int half = r - (dh + 1) / 2;
      if (half < 0)
        throw DegreeMismatch("constraint of degree " + std::to_string(dh) +
                             " does not fit level r = " + std::to_string(r));
      blocks_.push_back({side, static_cast<int>(j), h, monomials_up_to(n, half)});
    }
  };
  if (spec_.lower_on) add_side(Side::lower, *spec_.lower_on);
  if (spec_.nonneg_on) add_side(Side::nonneg, *spec_.nonneg_on);

  // Elimination applies when decision columns are in one-to-one
  // correspondence with distinct monomials at unit multiplicity.
  std::map<MultiIndex, std::size_t, GradedLex> dec_of;
  eliminated_ = true;
  for (std::size_t c = 0; c < spec_.decision.size(); ++c) {
    const auto& col = spec_.decision[c];
    if (col.multiplicity != 1.0 || !dec_of.try_emplace(col.monomial, c).second)
      eliminated_ = false;
  }
  if (!eliminated_) dec_of.clear();
  n_free_ = eliminated_ ? 0 : 2 * spec_.decision.size();

  conic_.cones.nonneg = n_free_;
  for (const auto& b : blocks_) conic_.cones.psd.push_back(b.basis.size());
  const std::size_t nvar = conic_.cones.dim();
  conic_.c = VectorXd::Zero(nvar);

  const bool has_lower = spec_.lower_on.has_value();
  const bool has_nonneg = spec_.nonneg_on.has_value();
  const MultiIndex zero(n, 0);

  // Row assignment: row_of[side][monomial], sign of the side's Gram sum.
  const std::size_t nm = monomials_.size();
  std::vector<long> row_lower(nm, -1), row_nonneg(nm, -1);
  std::vector<double> rhs;
  for (std::size_t i = 0; i < nm; ++i) {
    const MultiIndex& k = monomials_[i];
    const double tk = spec_.fixed_target.coeff(k);
    const double delta = k == zero ? 1.0 : 0.0;
    const bool dec = dec_of.count(k) > 0;
    if (eliminated_ && dec) {
      if (has_lower && has_nonneg) {
        row_lower[i] = row_nonneg[i] = static_cast<long>(rhs.size());
        rhs.push_back(delta);  // nonneg_k - lower_k = delta
        row_labels_.push_back("couple:" + to_string(k));
      }
      continue;
    }
    if (has_lower) {
      row_lower[i] = static_cast<long>(rhs.size());
      rhs.push_back(tk - delta);
      row_labels_.push_back("lower:" + to_string(k));
    }
    if (has_nonneg) {
      row_nonneg[i] = static_cast<long>(rhs.size());
      rhs.push_back(tk);
      row_labels_.push_back("nonneg:" + to_string(k));
    }
  }
  conic_.b = Eigen::Map<VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  conic_.A = MatrixXd::Zero(static_cast<Eigen::Index>(rhs.size()), static_cast<Eigen::Index>(nvar));

  const bool coupled = has_lower && has_nonneg;
  // Side whose expansion defines q after elimination.
  const Side q_side = has_nonneg ? Side::nonneg : Side::lower;

  for (std::size_t kb = 0; kb < blocks_.size(); ++kb) {
    const GramBlock& blk = blocks_[kb];
    const auto& rows = blk.side == Side::lower ? row_lower : row_nonneg;
    for (std::size_t a = 0; a < blk.basis.size(); ++a)
      for (std::size_t b = 0; b < blk.basis.size(); ++b)
        for (const auto& [g, hg] : blk.weight.terms()) {
          MultiIndex k(n);
          for (std::size_t i = 0; i < n; ++i) k[i] = blk.basis[a][i] + blk.basis[b][i] + g[i];
          const std::size_t mi = mono_index_.at(k);
          const bool dec = eliminated_ && dec_of.count(k) > 0;
          if (rows[mi] >= 0) {
            const double sign = (dec && coupled && blk.side == Side::lower) ? -1.0 : 1.0;
            conic_.add_psd_entry(static_cast<std::size_t>(rows[mi]), kb, a, b, sign * hg);
          }
          if (dec && blk.side == q_side)
            conic_.add_psd_objective(kb, a, b, spec_.decision[dec_of.at(k)].price * hg);
        }
  }

  if (eliminated_) {
    // q_k = side_k - T_k (+ delta on the lower side)
    for (const auto& [k, c] : dec_of) {
      const double delta = k == zero ? 1.0 : 0.0;
      const double extra = q_side == Side::lower ? delta : 0.0;
      offset_ += spec_.decision[c].price * (extra - spec_.fixed_target.coeff(k));
    }
  } else {
    for (std::size_t c = 0; c < spec_.decision.size(); ++c) {
      const auto& col = spec_.decision[c];
      const std::size_t mi = mono_index_.at(col.monomial);
      for (auto rowv : {row_lower[mi], row_nonneg[mi]}) {
        if (rowv < 0) continue;
        conic_.A(rowv, static_cast<Eigen::Index>(2 * c)) -= col.multiplicity;
        conic_.A(rowv, static_cast<Eigen::Index>(2 * c + 1)) += col.multiplicity;
      }
      conic_.c(static_cast<Eigen::Index>(2 * c)) = col.price;
      conic_.c(static_cast<Eigen::Index>(2 * c + 1)) = -col.price;
    }
  }
}

Polynomial PutinarProgram::side_expansion(Side side,
                                          const std::vector<MatrixXd>& grams) const {
  const std::size_t n = spec_.nvars;
  Polynomial p(n);
  for (std::size_t kb = 0; kb < blocks_.size(); ++kb) {
    const GramBlock& blk = blocks_[kb];
    if (blk.side != side) continue;
    const MatrixXd& G = grams.at(kb);
    for (std::size_t a = 0; a < blk.basis.size(); ++a)
      for (std::size_t b = 0; b < blk.basis.size(); ++b)
        for (const auto& [g, hg] : blk.weight.terms()) {
          MultiIndex k(n);
          for (std::size_t i = 0; i < n; ++i) k[i] = blk.basis[a][i] + blk.basis[b][i] + g[i];
          p.add_term(k, G(a, b) * hg);
        }
  }
  return p;
}

double PutinarProgram::residual(const std::vector<double>& q,
                                const std::vector<MatrixXd>& grams) const {
  const std::size_t n = spec_.nvars;
  Polynomial target = spec_.fixed_target;
  for (std::size_t c = 0; c < spec_.decision.size(); ++c)
    target.add_term(spec_.decision[c].monomial, spec_.decision[c].multiplicity * q[c]);
  double res = 0.0;
  if (spec_.lower_on) {
    Polynomial d = target - Polynomial::constant(n, 1.0) - side_expansion(Side::lower, grams);
    res = std::max(res, d.max_abs_coeff());
  }
  if (spec_.nonneg_on) {
    Polynomial d = target - side_expansion(Side::nonneg, grams);
    res = std::max(res, d.max_abs_coeff());
  }
  return res;
}

SolvedPutinar PutinarProgram::reconstruct(const sdp::ConicSolution& sol) const {
  const std::size_t n = spec_.nvars;
  SolvedPutinar out;
  out.min_gram_eigenvalue = kInf;
  for (std::size_t kb = 0; kb < blocks_.size(); ++kb) {
    const std::size_t side = blocks_[kb].basis.size();
    MatrixXd G = sdp::smat(sol.x.segment(block_var_offset(kb), sdp::svec_size(side)), side);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
    out.min_gram_eigenvalue = std::min(out.min_gram_eigenvalue, es.eigenvalues()(0));
    out.grams.push_back(std::move(G));
  }
  out.q.resize(spec_.decision.size());
  if (eliminated_) {
    const Side q_side = spec_.nonneg_on ? Side::nonneg : Side::lower;
    Polynomial e = side_expansion(q_side, out.grams);
    const MultiIndex zero(n, 0);
    for (std::size_t c = 0; c < spec_.decision.size(); ++c) {
      const MultiIndex& k = spec_.decision[c].monomial;
      const double extra = (q_side == Side::lower && k == zero) ? 1.0 : 0.0;
      out.q[c] = e.coeff(k) + extra - spec_.fixed_target.coeff(k);
    }
  } else {
    for (std::size_t c = 0; c < spec_.decision.size(); ++c)
      out.q[c] = sol.x(static_cast<Eigen::Index>(2 * c)) -
                 sol.x(static_cast<Eigen::Index>(2 * c + 1));
  }
  out.decision_polynomial = Polynomial(n);
  for (std::size_t c = 0; c < spec_.decision.size(); ++c) {
    out.decision_polynomial.add_term(spec_.decision[c].monomial,
                                     spec_.decision[c].multiplicity * out.q[c]);
    out.objective += spec_.decision[c].price * out.q[c];
  }
  out.reconstruction_residual = residual(out.q, out.grams);
  return out;
}

PutinarProgram assemble_putinar(const Polynomial& target,
                                std::optional<SemialgebraicSet> lower_on,
                                std::optional<SemialgebraicSet> nonneg_on, int r) {
  if (r < (std::max(target.degree(), 0) + 1) / 2)
    throw DegreeMismatch("level r = " + std::to_string(r) +
                         " is below half the target degree");
  PutinarSpec s;
  s.nvars = target.nvars();
  s.fixed_target = target;
  s.lower_on = std::move(lower_on);
  s.nonneg_on = std::move(nonneg_on);
  s.level = r;
  return PutinarProgram(std::move(s));
}

}  // namespace concbound::poly
