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

#ifndef BYZRELAY_INFORMATION_HPP
#define BYZRELAY_INFORMATION_HPP

#include <cmath>
#include <span>
#include <vector>

#include "byzrelay/channel.hpp"

namespace byzrelay {

/// Shannon entropy in bits with 0 log 0 = 0.
inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

/// p(x1, x2, u) = law(u | x1, x2) P_X1(x1) P_X2(x2), indexed (x1, x2, u).
class JointPmf {
 public:
  JointPmf(std::size_t x1, std::size_t x2, std::size_t u, std::vector<double> p)
      : n1_(x1), n2_(x2), nu_(u), p_(std::move(p)) {
    validate_pmf(p_, n1_ * n2_ * nu_, kStochasticTol, "joint pmf");
  }

  [[nodiscard]] std::size_t x1_size() const { return n1_; }
  [[nodiscard]] std::size_t x2_size() const { return n2_; }
  [[nodiscard]] std::size_t u_size() const { return nu_; }
  [[nodiscard]] double operator()(std::size_t a, std::size_t b, std::size_t u) const {
    return p_[(a * n2_ + b) * nu_ + u];
  }
  [[nodiscard]] const std::vector<double>& table() const { return p_; }

  [[nodiscard]] std::vector<double> marginal_x1() const { return marginal(0); }
  [[nodiscard]] std::vector<double> marginal_x2() const { return marginal(1); }
  [[nodiscard]] std::vector<double> marginal_u() const { return marginal(2); }

  /// p(x1, u) flattened (x1, u).
  [[nodiscard]] std::vector<double> marginal_x1_u() const {
    std::vector<double> m(n1_ * nu_, 0.0);
    for (std::size_t a = 0; a < n1_; ++a)
      for (std::size_t b = 0; b < n2_; ++b)
        for (std::size_t u = 0; u < nu_; ++u) m[a * nu_ + u] += (*this)(a, b, u);
    return m;
  }
  /// p(x2, u) flattened (x2, u).
  [[nodiscard]] std::vector<double> marginal_x2_u() const {
    std::vector<double> m(n2_ * nu_, 0.0);
    for (std::size_t a = 0; a < n1_; ++a)
      for (std::size_t b = 0; b < n2_; ++b)
        for (std::size_t u = 0; u < nu_; ++u) m[b * nu_ + u] += (*this)(a, b, u);
    return m;
  }
  /// p(x1, x2) flattened (x1, x2).
  [[nodiscard]] std::vector<double> marginal_x1_x2() const {
    std::vector<double> m(n1_ * n2_, 0.0);
    for (std::size_t a = 0; a < n1_; ++a)
      for (std::size_t b = 0; b < n2_; ++b)
        for (std::size_t u = 0; u < nu_; ++u) m[a * n2_ + b] += (*this)(a, b, u);
    return m;
  }

  /// Reference pmf for the decoder of node `side`, flattened over
  /// (u, own input, other input).
  [[nodiscard]] std::vector<double> decoder_reference(Side side) const {
    const std::size_t own = side == Side::One ? n1_ : n2_;
    const std::size_t oth = side == Side::One ? n2_ : n1_;
    std::vector<double> r(nu_ * own * oth);
    for (std::size_t u = 0; u < nu_; ++u)
      for (std::size_t a = 0; a < own; ++a)
        for (std::size_t b = 0; b < oth; ++b)
          r[(u * own + a) * oth + b] =
              side == Side::One ? (*this)(a, b, u) : (*this)(b, a, u);
    return r;
  }

  /// P_{X1|U} as a conditional pmf (output X1, input U). Where p(u) = 0 the
  /// column falls back to the prior P_X1.
  [[nodiscard]] ConditionalPmf x1_given_u() const {
    const auto pu = marginal_u();
    const auto px1 = marginal_x1();
    const auto pxu = marginal_x1_u();
    std::vector<double> t(nu_ * n1_);
    for (std::size_t u = 0; u < nu_; ++u) {
      double s = 0.0;
      for (std::size_t a = 0; a < n1_; ++a) {
        t[u * n1_ + a] = pu[u] > 0.0 ? pxu[a * nu_ + u] / pu[u] : px1[a];
        s += t[u * n1_ + a];
      }
      for (std::size_t a = 0; a < n1_; ++a) t[u * n1_ + a] /= s;
    }
    return ConditionalPmf(Alphabet(n1_), {Alphabet(nu_)}, std::move(t));
  }

 private:
  [[nodiscard]] std::vector<double> marginal(int axis) const {
    std::vector<double> m(axis == 0 ? n1_ : axis == 1 ? n2_ : nu_, 0.0);
    for (std::size_t a = 0; a < n1_; ++a)
      for (std::size_t b = 0; b < n2_; ++b)
        for (std::size_t u = 0; u < nu_; ++u)
          m[axis == 0 ? a : axis == 1 ? b : u] += (*this)(a, b, u);
    return m;
  }

  std::size_t n1_, n2_, nu_;
  std::vector<double> p_;
};

inline JointPmf joint_from(const MacChannel& ch, const Pmf& p1, const Pmf& p2) {
  validate_pmf(p1, ch.x1().size(), kStochasticTol, "P_X1");
  validate_pmf(p2, ch.x2().size(), kStochasticTol, "P_X2");
  const std::size_t n1 = ch.x1().size(), n2 = ch.x2().size(), nu = ch.u().size();
  std::vector<double> p(n1 * n2 * nu);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t u = 0; u < nu; ++u)
        p[(a * n2 + b) * nu + u] =
            ch.prob(static_cast<Symbol>(u), static_cast<Symbol>(a), static_cast<Symbol>(b)) *
            p1[a] * p2[b];
  return JointPmf(n1, n2, nu, std::move(p));
}

/// The five quantities that bound the rate window, in bits.
struct MutualInformations {
  double x1_u;          // I(X1;U)
  double x2_u;          // I(X2;U)
  double x1_u_given_x2; // I(X1;U|X2)
  double x2_u_given_x1; // I(X2;U|X1)
  double x1x2_u;        // I(X1,X2;U)
};

inline MutualInformations mutual_informations(const JointPmf& j) {
  const double h_u = entropy_bits(j.marginal_u());
  const double h_x1 = entropy_bits(j.marginal_x1());
  const double h_x2 = entropy_bits(j.marginal_x2());
  const double h_x1u = entropy_bits(j.marginal_x1_u());
  const double h_x2u = entropy_bits(j.marginal_x2_u());
  const double h_x1x2 = entropy_bits(j.marginal_x1_x2());
  const double h_all = entropy_bits(j.table());

  auto nonneg = [](double v) { return v < 0.0 && v > -1e-12 ? 0.0 : v; };
  MutualInformations mi{};
  mi.x1_u = nonneg(h_x1 + h_u - h_x1u);
  mi.x2_u = nonneg(h_x2 + h_u - h_x2u);
  mi.x1_u_given_x2 = nonneg(h_x1x2 + h_x2u - h_all - h_x2);
  mi.x2_u_given_x1 = nonneg(h_x1x2 + h_x1u - h_all - h_x1);
  mi.x1x2_u = nonneg(h_x1x2 + h_u - h_all);
  return mi;
}

}  // namespace byzrelay

#endif  // BYZRELAY_INFORMATION_HPP
