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

#ifndef BYZRELAY_MIN_MI_HPP
#define BYZRELAY_MIN_MI_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "byzrelay/probability.hpp"
#include "byzrelay/random.hpp"
#include "byzrelay/simplex.hpp"
#include "byzrelay/typicality.hpp"

namespace byzrelay {

enum class WindowClass { E1, E2 };

inline const char* to_string(WindowClass c) { return c == WindowClass::E1 ? "E1" : "E2"; }

struct MinMiOptions {
  int starts = 20;
  double tolerance = 1e-8;  // stop when the Frank-Wolfe gap falls below this
  int max_iterations = 500;
  std::uint64_t seed = 0x6d696e6d69ULL;
};

/// Minimum of I(X~; V~ | U~) over the constraint set, with its minimizer.
struct MinMiDiagnostic {
  double value = std::numeric_limits<double>::infinity();  // bits; +inf when infeasible
  bool feasible = false;
  std::vector<double> argmin;  // joint pmf over (x, u, v), flattened row-major
  double tolerance = 0.0;      // the box half-width mu~
  std::vector<double> start_values;  // objective at each feasible start
  std::size_t x_size = 0, u_size = 0;
};

namespace detail {

/// Variables r(x | u, v) for every pair with q(u, v) > 0.
class MinMiProblem {
 public:
  MinMiProblem(std::vector<double> q, const ConditionalPmf& p_x_given_u, double box)
      : q_(std::move(q)), nx_(p_x_given_u.num_outputs()), m_(p_x_given_u.num_columns()) {
    if (q_.size() != m_ * m_) throw InputError("min_conditional_mi: joint shape mismatch");
    for (std::size_t k = 0; k < q_.size(); ++k)
      if (q_[k] > 0.0) pairs_.push_back(k);
    qu_.assign(m_, 0.0);
    qv_.assign(m_, 0.0);
    for (std::size_t u = 0; u < m_; ++u)
      for (std::size_t v = 0; v < m_; ++v) {
        qu_[u] += q_[u * m_ + v];
        qv_[v] += q_[u * m_ + v];
      }

    lp_ = lp::Problem(num_vars());
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      std::vector<double> row(num_vars(), 0.0);
      for (std::size_t x = 0; x < nx_; ++x) row[var(k, x)] = 1.0;
      lp_.add(std::move(row), lp::Relation::Equal, 1.0);
    }
    // Box constraints on the X~ | U~ and X~ | V~ conditionals (closed).
    for (int axis = 0; axis < 2; ++axis) {
      const auto& marg = axis == 0 ? qu_ : qv_;
      for (std::size_t s = 0; s < m_; ++s) {
        if (!(marg[s] > 0.0)) continue;
        for (std::size_t x = 0; x < nx_; ++x) {
          std::vector<double> row(num_vars(), 0.0);
          for (std::size_t k = 0; k < pairs_.size(); ++k) {
            const std::size_t u = pairs_[k] / m_, v = pairs_[k] % m_;
            if ((axis == 0 ? u : v) == s) row[var(k, x)] = q_[pairs_[k]] / marg[s];
          }
          const double target = p_x_given_u(x, s);
          const double slack = box + kTypicalitySlack;
          if (target - slack > 0.0) lp_.add(row, lp::Relation::GreaterEqual, target - slack);
          if (target + slack < 1.0) lp_.add(row, lp::Relation::LessEqual, target + slack);
        }
      }
    }
  }

  [[nodiscard]] std::size_t num_vars() const { return pairs_.size() * nx_; }
  [[nodiscard]] std::size_t var(std::size_t k, std::size_t x) const { return k * nx_ + x; }

  /// I(X~; V~ | U~) in bits at r.
  [[nodiscard]] double objective(const std::vector<double>& r) const {
    const auto bar = mixture(r);
    double f = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const std::size_t u = pairs_[k] / m_;
      for (std::size_t x = 0; x < nx_; ++x) {
        const double rv = r[var(k, x)];
        if (rv > 0.0) f += q_[pairs_[k]] * rv * std::log2(rv / bar[u * nx_ + x]);
      }
    }
    return std::max(0.0, f);
  }

  [[nodiscard]] std::vector<double> gradient(const std::vector<double>& r) const {
    constexpr double kFloor = 1e-300;
    const auto bar = mixture(r);
    std::vector<double> g(num_vars());
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const std::size_t u = pairs_[k] / m_;
      for (std::size_t x = 0; x < nx_; ++x)
        g[var(k, x)] = q_[pairs_[k]] * std::log2(std::max(r[var(k, x)], kFloor) /
                                                 std::max(bar[u * nx_ + x], kFloor));
    }
    return g;
  }

  /// Vertex minimizing c . r over the constraint set; empty when infeasible.
  [[nodiscard]] std::vector<double> vertex(const std::vector<double>& c) const {
    lp::Problem p = lp_;
    p.objective = c;
    const auto sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) return {};
    return sol.x;
  }

  /// A feasible point with r(. | u, v) the same for every v, if one exists;
  /// I(X~; V~ | U~) is exactly zero there.
  [[nodiscard]] std::vector<double> independent_point() const {
    lp::Problem p = lp_;
    for (std::size_t a = 0; a < pairs_.size(); ++a)
      for (std::size_t b = a + 1; b < pairs_.size(); ++b) {
        if (pairs_[a] / m_ != pairs_[b] / m_) continue;
        for (std::size_t x = 0; x < nx_; ++x) {
          std::vector<double> row(num_vars(), 0.0);
          row[var(a, x)] = 1.0;
          row[var(b, x)] = -1.0;
          p.add(std::move(row), lp::Relation::Equal, 0.0);
        }
        break;  // chaining consecutive pairs of the same u is enough
      }
    const auto sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) return {};
    return sol.x;
  }

  [[nodiscard]] std::vector<double> joint(const std::vector<double>& r) const {
    std::vector<double> j(nx_ * m_ * m_, 0.0);
    for (std::size_t k = 0; k < pairs_.size(); ++k)
      for (std::size_t x = 0; x < nx_; ++x) j[x * m_ * m_ + pairs_[k]] = q_[pairs_[k]] * r[var(k, x)];
    return j;
  }

  [[nodiscard]] std::size_t x_size() const { return nx_; }
  [[nodiscard]] std::size_t u_size() const { return m_; }

 private:
  /// r-bar(x | u) = sum_v q(v | u) r(x | u, v).
  [[nodiscard]] std::vector<double> mixture(const std::vector<double>& r) const {
    std::vector<double> bar(m_ * nx_, 0.0);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const std::size_t u = pairs_[k] / m_;
      for (std::size_t x = 0; x < nx_; ++x)
        bar[u * nx_ + x] += q_[pairs_[k]] / qu_[u] * r[var(k, x)];
    }
    return bar;
  }

  std::vector<double> q_;
  std::size_t nx_, m_;
  std::vector<std::size_t> pairs_;
  std::vector<double> qu_, qv_;
  lp::Problem lp_;
};

inline double golden_section(const std::function<double(double)>& f) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (a + b);
  // Endpoints are candidates too: the objective may be minimized at a vertex.
  double best = mid, fb = f(mid);
  for (double t : {0.0, 1.0}) {
    const double ft = f(t);
    if (ft < fb) {
      fb = ft;
      best = t;
    }
  }
  return best;
}

}  // namespace detail

/// Minimum of I(X~; V~ | U~) over joints whose (U~, V~) marginal equals `q`
/// (|U| x |U|, row-major over (u, v)) and whose conditionals P_{X~|U~} and
/// P_{X~|V~} lie entrywise within `box` of `p_x_given_u` (output X, input U;
/// the V~ side is compared against the same table since V = U).
///
/// The objective is convex in the free conditional, so multi-start
/// Frank-Wolfe with an LP step converges to the global minimum; an exact LP
/// check for a conditionally independent feasible point short-circuits the
/// zero case.
inline MinMiDiagnostic min_conditional_mi_joint(const std::vector<double>& q,
                                                const ConditionalPmf& p_x_given_u, double box,
                                                const MinMiOptions& opt = {}) {
  if (p_x_given_u.inputs().size() != 1) throw InputError("P_X1|U must have a single input U");
  validate_pmf(q, q.size(), 1e-9, "pinned (u, v) joint");
  if (!(box >= 0.0)) throw InputError("min_conditional_mi: tolerance must be >= 0");
  if (opt.starts < 1) throw InputError("min_conditional_mi: need at least one start");

  detail::MinMiProblem prob(q, p_x_given_u, box);
  MinMiDiagnostic d;
  d.tolerance = box;
  d.x_size = prob.x_size();
  d.u_size = prob.u_size();

  if (auto r0 = prob.independent_point(); !r0.empty()) {
    d.feasible = true;
    d.value = prob.objective(r0);
    d.start_values.push_back(d.value);
    d.argmin = prob.joint(r0);
    if (d.value == 0.0) return d;
  }

  for (int s = 0; s < opt.starts; ++s) {
    Rng rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(s)}));
    std::vector<double> r(prob.num_vars(), 0.0);
    double wsum = 0.0;
    bool ok = true;
    for (int v = 0; v < 3 && ok; ++v) {
      std::vector<double> c(prob.num_vars());
      for (auto& ci : c) ci = uniform01(rng) - 0.5;
      const auto vert = prob.vertex(c);
      if (vert.empty()) {
        ok = false;
        break;
      }
      const double w = 0.1 + uniform01(rng);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += w * vert[i];
      wsum += w;
    }
    if (!ok) break;  // constraint set empty
    for (auto& ri : r) ri /= wsum;
    d.feasible = true;

    double f = prob.objective(r);
    d.start_values.push_back(f);
    for (int it = 0; it < opt.max_iterations; ++it) {
      const auto g = prob.gradient(r);
      const auto sv = prob.vertex(g);
      if (sv.empty()) break;
      double gap = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) gap += g[i] * (r[i] - sv[i]);
      if (gap < opt.tolerance) break;
      std::vector<double> trial(r.size());
      auto along = [&](double t) {
        for (std::size_t i = 0; i < r.size(); ++i) trial[i] = r[i] + t * (sv[i] - r[i]);
        return prob.objective(trial);
      };
      const double t = detail::golden_section(along);
      const double ft = along(t);
      if (!(ft < f)) break;
      r = trial;
      f = ft;
    }
    if (f < d.value) {
      d.value = f;
      d.argmin = prob.joint(r);
    }
  }
  return d;
}

/// Pinned joint of (u^n, v^n) as a |U| x |U| pmf.
inline std::vector<double> pinned_joint(SequenceView u, SequenceView v, std::size_t u_size) {
  if (u.size() != v.size()) throw InputError("min_conditional_mi: sequences are not aligned");
  return empirical_pmf({u, v}, {u_size, u_size}).frequencies();
}

inline MinMiDiagnostic min_conditional_mi(SequenceView u, SequenceView v,
                                          const ConditionalPmf& p_x_given_u, double mu_tilde,
                                          const MinMiOptions& opt = {}) {
  return min_conditional_mi_joint(pinned_joint(u, v, p_x_given_u.num_columns()), p_x_given_u,
                                  mu_tilde, opt);
}

/// E1 iff the minimum exceeds lambda (an empty constraint set counts as +inf).
inline WindowClass classify_value(const MinMiDiagnostic& d, double lambda) {
  return d.value > lambda ? WindowClass::E1 : WindowClass::E2;
}

inline WindowClass classify_window(SequenceView u, SequenceView v, const ConditionalPmf& p_x_given_u,
                                   const ToleranceSchedule& schedule, const MinMiOptions& opt = {}) {
  const std::size_t n = u.size();
  const auto d = min_conditional_mi(u, v, p_x_given_u, schedule.mu_tilde(n), opt);
  return classify_value(d, schedule.lambda(n));
}

}  // namespace byzrelay

#endif  // BYZRELAY_MIN_MI_HPP
