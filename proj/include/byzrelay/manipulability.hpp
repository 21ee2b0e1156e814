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

#ifndef BYZRELAY_MANIPULABILITY_HPP
#define BYZRELAY_MANIPULABILITY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "byzrelay/channel.hpp"
#include "byzrelay/simplex.hpp"

namespace byzrelay {

/// Tolerance for the witness LP and for the post-hoc witness checks.
inline constexpr double kWitnessTol = 1e-9;

/// |U| x |U| matrix certifying that an observation channel is manipulable.
///
/// Column j is balanced (sums to zero) and (0,0)-polarized at j: entry j is
/// nonnegative and every other entry nonpositive. Under this reading the
/// witness is exactly -(T - I) for some substitution channel T over U, up to
/// scale. Normalized to trace 1.
struct UpsilonWitness {
  std::size_t size = 0;
  std::vector<double> matrix;  // row-major, matrix[i * size + j] = Upsilon_ij
  double trace = 0.0;

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return matrix[i * size + j]; }
};

namespace detail {

/// (P_out * Upsilon * P_obs) as a dense |Y| x |X| matrix.
inline std::vector<double> witness_image(const UpsilonWitness& w, const ConditionalPmf& p_obs,
                                         const ConditionalPmf& p_out) {
  const std::size_t m = w.size, nx = p_obs.num_columns(), ny = p_out.num_outputs();
  std::vector<double> up(m * nx, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t j = 0; j < m; ++j) up[i * nx + x] += w(i, j) * p_obs(j, x);
  std::vector<double> img(ny * nx, 0.0);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t i = 0; i < m; ++i) img[y * nx + x] += p_out(y, i) * up[i * nx + x];
  return img;
}

inline void check_dimensions(const ConditionalPmf& p_obs, const ConditionalPmf& p_out) {
  if (p_out.num_columns() != p_obs.num_outputs())
    throw InputError("find_witness: P_out input alphabet (" +
                     std::to_string(p_out.num_columns()) + ") must equal P_obs output alphabet (" +
                     std::to_string(p_obs.num_outputs()) + ")");
}

}  // namespace detail

/// Independent re-check of every witness property; used on solver output.
inline bool verify_witness(const UpsilonWitness& w, const ConditionalPmf& p_obs,
                           const ConditionalPmf& p_out, double tol = kWitnessTol) {
  if (w.size != p_obs.num_outputs() || w.matrix.size() != w.size * w.size) return false;
  double tr = 0.0;
  for (std::size_t j = 0; j < w.size; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < w.size; ++i) {
      const double v = w(i, j);
      col += v;
      if (i == j ? v < -tol : v > tol) return false;
    }
    if (std::abs(col) > tol) return false;
    tr += w(j, j);
  }
  if (std::abs(tr - 1.0) > tol) return false;
  for (double v : detail::witness_image(w, p_obs, p_out))
    if (std::abs(v) > tol) return false;
  return true;
}

/// Search for a manipulability witness of the observation channel
/// (P_obs = P_{U|X}, P_out = P_{Y|V}). Returns nullopt when the channel is
/// non-manipulable.
///
/// The search is an LP feasibility problem over the off-diagonal magnitudes
/// y_ij = -Upsilon_ij >= 0 (i != j), with Upsilon_jj = sum_i y_ij making every
/// column balanced and polarized by construction. The remaining constraints
/// are P_out Upsilon P_obs = 0 and trace(Upsilon) = 1; the trace normalization
/// loses nothing because balance and polarization make trace 0 force
/// Upsilon = 0.
inline std::optional<UpsilonWitness> find_witness(const ConditionalPmf& p_obs,
                                                  const ConditionalPmf& p_out) {
  detail::check_dimensions(p_obs, p_out);
  const std::size_t m = p_obs.num_outputs();
  const std::size_t nx = p_obs.num_columns();
  const std::size_t ny = p_out.num_outputs();
  if (m < 2) return std::nullopt;

  // Variable k <-> (i, j), i != j, column-major.
  std::vector<std::pair<std::size_t, std::size_t>> var;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) var.emplace_back(i, j);

  // Upsilon_ij as a linear form over the variables.
  auto upsilon_coeff = [&](std::size_t i, std::size_t j, std::size_t k) {
    const auto [vi, vj] = var[k];
    if (vj != j) return 0.0;
    if (i == j) return 1.0;
    return vi == i ? -1.0 : 0.0;
  };

  lp::Problem prob(var.size());
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      std::vector<double> row(var.size(), 0.0);
      for (std::size_t k = 0; k < var.size(); ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double py = p_out(y, i);
          if (py == 0.0) continue;
          for (std::size_t j = 0; j < m; ++j) {
            const double pj = p_obs(j, x);
            if (pj != 0.0) c += py * upsilon_coeff(i, j, k) * pj;
          }
        }
        row[k] = c;
      }
      prob.add(std::move(row), lp::Relation::Equal, 0.0);
    }
  }
  prob.add(std::vector<double>(var.size(), 1.0), lp::Relation::Equal, 1.0);

  const auto sol = lp::solve(prob, kWitnessTol);
  if (sol.status != lp::Status::Optimal) return std::nullopt;

  UpsilonWitness w;
  w.size = m;
  w.matrix.assign(m * m, 0.0);
  for (std::size_t k = 0; k < var.size(); ++k) {
    const auto [i, j] = var[k];
    w.matrix[i * m + j] -= sol.x[k];
    w.matrix[j * m + j] += sol.x[k];
  }
  for (std::size_t j = 0; j < m; ++j) w.trace += w(j, j);
  if (!verify_witness(w, p_obs, p_out))
    throw std::logic_error("find_witness: LP solution failed independent witness verification");
  return w;
}

inline bool is_manipulable(const ConditionalPmf& p_obs, const ConditionalPmf& p_out) {
  return find_witness(p_obs, p_out).has_value();
}

/// Per-side outcome of the non-manipulability condition for a MAC and a pair
/// of product input distributions.
struct ConditionReport {
  std::optional<UpsilonWitness> side1;  // witness for (P_{U|X1}, I)
  std::optional<UpsilonWitness> side2;  // witness for (P_{U|X2}, I)
  [[nodiscard]] bool holds() const { return !side1 && !side2; }
};

inline ConditionReport condition_report(const MacChannel& ch, const Pmf& p1, const Pmf& p2) {
  const auto id = ConditionalPmf::identity(ch.u().size());
  ConditionReport r;
  r.side1 = find_witness(observation_channel(ch, p2, Side::One), id);
  r.side2 = find_witness(observation_channel(ch, p1, Side::Two), id);
  return r;
}

/// Both observation channels (P_{U|X1}, I) and (P_{U|X2}, I) are non-manipulable.
inline bool theorem_condition_holds(const MacChannel& ch, const Pmf& p1, const Pmf& p2) {
  return condition_report(ch, p1, p2).holds();
}

/// Memoryless substitution T = I - c Upsilon with c = 1 / max_j Upsilon_jj.
/// Columns of T are pmfs, T != I, and T P_obs = P_obs: the substitution is
/// invisible through the observation channel the witness was found for.
inline ConditionalPmf witness_to_attack(const UpsilonWitness& w, const ConditionalPmf& p_obs) {
  if (w.size != p_obs.num_outputs()) throw InputError("witness_to_attack: size mismatch");
  double max_diag = 0.0;
  for (std::size_t j = 0; j < w.size; ++j) max_diag = std::max(max_diag, w(j, j));
  if (!(max_diag > 0.0)) throw InputError("witness_to_attack: witness has zero diagonal");
  const double c = 1.0 / max_diag;

  const std::size_t m = w.size;
  std::vector<double> table(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double t = (i == j ? 1.0 : 0.0) - c * w(i, j);
      t = std::clamp(t, 0.0, 1.0);
      table[j * m + i] = t;
      sum += t;
    }
    for (std::size_t i = 0; i < m; ++i) table[j * m + i] /= sum;
  }
  ConditionalPmf t(p_obs.output(), {p_obs.output()}, std::move(table));

  for (std::size_t x = 0; x < p_obs.num_columns(); ++x)
    for (std::size_t i = 0; i < m; ++i) {
      double tp = 0.0;
      for (std::size_t j = 0; j < m; ++j) tp += t(i, j) * p_obs(j, x);
      if (std::abs(tp - p_obs(i, x)) > kWitnessTol)
        throw InputError("witness_to_attack: witness does not annihilate P_obs");
    }
  return t;
}

}  // namespace byzrelay

#endif  // BYZRELAY_MANIPULABILITY_HPP
