/*
 * Copyright 2026 The byzrelay Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BYZRELAY_SIMPLEX_HPP
#define BYZRELAY_SIMPLEX_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "byzrelay/error.hpp"

namespace byzrelay::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation;
  double rhs;
};

/// minimize objective . x  subject to constraints, x >= 0.
/// An empty objective means pure feasibility.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<double> objective;

  explicit Problem(std::size_t n = 0) : num_vars(n) {}

  void add(std::vector<double> coeffs, Relation rel, double rhs) {
    if (coeffs.size() != num_vars) throw InputError("lp: constraint width mismatch");
    constraints.push_back({std::move(coeffs), rel, rhs});
  }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule, so it cannot cycle.
/// `tol` is the feasibility / pivot tolerance.
class Tableau {
 public:
  Tableau(const Problem& p, double tol) : tol_(tol), n_orig_(p.num_vars) {
    const std::size_t m = p.constraints.size();
    std::size_t n_slack = 0, n_art = 0;
    for (const auto& c : p.constraints) {
      const bool flip = c.rhs < 0.0;
      const Relation r = flip ? mirrored(c.relation) : c.relation;
      if (r != Relation::Equal) ++n_slack;
      if (r != Relation::LessEqual) ++n_art;
    }
    first_art_ = n_orig_ + n_slack;
    cols_ = first_art_ + n_art;
    rows_.assign(m, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m, 0);

    std::size_t s = n_orig_, a = first_art_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = p.constraints[i];
      const bool flip = c.rhs < 0.0;
      const double sign = flip ? -1.0 : 1.0;
      const Relation r = flip ? mirrored(c.relation) : c.relation;
      for (std::size_t j = 0; j < n_orig_; ++j) rows_[i][j] = sign * c.coeffs[j];
      rows_[i][cols_] = sign * c.rhs;
      switch (r) {
        case Relation::LessEqual:
          rows_[i][s] = 1.0;
          basis_[i] = s++;
          break;
        case Relation::GreaterEqual:
          rows_[i][s++] = -1.0;
          rows_[i][a] = 1.0;
          basis_[i] = a++;
          break;
        case Relation::Equal:
          rows_[i][a] = 1.0;
          basis_[i] = a++;
          break;
      }
    }
  }

  Solution solve(const std::vector<double>& objective, std::size_t max_pivots) {
    Solution sol;
    // Phase 1: drive the artificial variables to zero.
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = first_art_; j < cols_; ++j) cost[j] = 1.0;
    if (first_art_ < cols_) {
      const Status st = optimize(cost, cols_, max_pivots, sol.pivots);
      if (st == Status::IterationLimit) {
        sol.status = st;
        return sol;
      }
      if (current_objective(cost) > tol_ * std::max<double>(1.0, rows_.size())) {
        sol.status = Status::Infeasible;
        return sol;
      }
      evict_artificials();
    }

    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < objective.size(); ++j) cost[j] = objective[j];
    const Status st = optimize(cost, first_art_, max_pivots, sol.pivots);
    sol.status = st;
    sol.x.assign(n_orig_, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (basis_[i] < n_orig_) sol.x[basis_[i]] = std::max(0.0, rows_[i][cols_]);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) sol.objective += objective[j] * sol.x[j];
    return sol;
  }

 private:
  static Relation mirrored(Relation r) {
    if (r == Relation::LessEqual) return Relation::GreaterEqual;
    if (r == Relation::GreaterEqual) return Relation::LessEqual;
    return r;
  }

  [[nodiscard]] double current_objective(const std::vector<double>& cost) const {
    double z = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) z += cost[basis_[i]] * rows_[i][cols_];
    return z;
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& pr = rows_[r];
    const double inv = 1.0 / pr[c];
    for (auto& v : pr) v *= inv;
    pr[c] = 1.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const double f = rows_[i][c];
      if (f == 0.0) continue;
      auto& row = rows_[i];
      for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * pr[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  /// Minimize cost over columns [0, allowed). Bland: lowest-index entering
  /// column with negative reduced cost; ratio ties go to the lowest basic index.
  Status optimize(const std::vector<double>& cost, std::size_t allowed, std::size_t max_pivots,
                  std::size_t& pivots) {
    std::vector<bool> is_basic(cols_, false);
    while (true) {
      std::fill(is_basic.begin(), is_basic.end(), false);
      for (auto b : basis_) is_basic[b] = true;
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (is_basic[j]) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < rows_.size(); ++i) rc -= cost[basis_[i]] * rows_[i][j];
        if (rc < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Status::Optimal;

      std::size_t leave = rows_.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double a = rows_[i][enter];
        if (a <= tol_) continue;
        const double ratio = rows_[i][cols_] / a;
        if (ratio < best - tol_ ||
            (std::abs(ratio - best) <= tol_ && leave < rows_.size() && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == rows_.size()) return Status::Unbounded;
      if (++pivots > max_pivots) return Status::IterationLimit;
      pivot(leave, enter);
    }
  }

  /// After phase 1, pivot zero-valued artificials out of the basis; rows where
  /// that is impossible are redundant and dropped.
  void evict_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_art_) {
        ++i;
        continue;
      }
      std::size_t col = first_art_;
      for (std::size_t j = 0; j < first_art_; ++j)
        if (std::abs(rows_[i][j]) > tol_) {
          col = j;
          break;
        }
      if (col < first_art_) {
        pivot(i, col);
        ++i;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  double tol_;
  std::size_t n_orig_;
  std::size_t first_art_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<std::size_t> basis_;
};

inline Solution solve(const Problem& p, double tol = 1e-9, std::size_t max_pivots = 200'000) {
  for (const auto& c : p.constraints)
    if (c.coeffs.size() != p.num_vars) throw InputError("lp: constraint width mismatch");
  if (!p.objective.empty() && p.objective.size() != p.num_vars)
    throw InputError("lp: objective width mismatch");
  Tableau t(p, tol);
  return t.solve(p.objective, max_pivots);
}

}  // namespace byzrelay::lp

#endif  // BYZRELAY_SIMPLEX_HPP
