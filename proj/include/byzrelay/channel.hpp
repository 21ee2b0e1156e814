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

#ifndef BYZRELAY_CHANNEL_HPP
#define BYZRELAY_CHANNEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "byzrelay/probability.hpp"
#include "byzrelay/random.hpp"

namespace byzrelay {

/// Which of the two end nodes an operation is about.
enum class Side { One = 1, Two = 2 };

inline Side other(Side s) { return s == Side::One ? Side::Two : Side::One; }

/// Discrete memoryless multiple-access channel p(u | x1, x2). The relay output
/// alphabet is always `u()`: forwarding never changes alphabets.
class MacChannel {
 public:
  MacChannel() = default;

  MacChannel(Alphabet x1, Alphabet x2, Alphabet u, std::vector<double> table,
             double tol = kStochasticTol)
      : law_(std::move(u), {std::move(x1), std::move(x2)}, std::move(table), tol) {}

  [[nodiscard]] const Alphabet& x1() const { return law_.inputs()[0]; }
  [[nodiscard]] const Alphabet& x2() const { return law_.inputs()[1]; }
  [[nodiscard]] const Alphabet& u() const { return law_.output(); }
  [[nodiscard]] const Alphabet& input(Side s) const { return s == Side::One ? x1() : x2(); }
  [[nodiscard]] const ConditionalPmf& law() const { return law_; }

  [[nodiscard]] std::size_t column(Symbol a, Symbol b) const { return a * x2().size() + b; }
  [[nodiscard]] double prob(Symbol u, Symbol a, Symbol b) const { return law_(u, column(a, b)); }

  /// True when every column is a point mass.
  [[nodiscard]] bool deterministic() const {
    for (double v : law_.table())
      if (v != 0.0 && v != 1.0) return false;
    return true;
  }

 private:
  ConditionalPmf law_;
};

/// U = X1 + X2 over binary inputs.
inline MacChannel binary_erasure_mac() {
  return MacChannel(Alphabet{"0", "1"}, Alphabet{"0", "1"}, Alphabet{"0", "1", "2"},
                    {1, 0, 0, /**/ 0, 1, 0, /**/ 0, 1, 0, /**/ 0, 0, 1});
}

/// Output uniform over `u_size` symbols regardless of the binary inputs.
inline MacChannel uniform_noise_mac(std::size_t u_size = 2) {
  std::vector<double> table(4 * u_size, 1.0 / static_cast<double>(u_size));
  return MacChannel(Alphabet(2), Alphabet(2), Alphabet(u_size), std::move(table));
}

/// Sample u^n with u_i ~ law(. | x1_i, x2_i) independently.
inline Sequence transmit_mac(const MacChannel& ch, SequenceView x1, SequenceView x2, Rng& rng) {
  if (x1.empty()) throw InputError("transmit_mac: block length must be at least 1");
  if (x1.size() != x2.size())
    throw InputError("transmit_mac: input lengths differ (" + std::to_string(x1.size()) + " vs " +
                     std::to_string(x2.size()) + ")");
  require_in_alphabet(x1, ch.x1(), "transmit_mac x1");
  require_in_alphabet(x2, ch.x2(), "transmit_mac x2");

  Sequence out(x1.size());
  const bool det = ch.deterministic();
  for (std::size_t i = 0; i < x1.size(); ++i) {
    auto col = ch.law().column(ch.column(x1[i], x2[i]));
    if (det) {
      for (std::size_t k = 0; k < col.size(); ++k)
        if (col[k] == 1.0) out[i] = static_cast<Symbol>(k);
    } else {
      out[i] = static_cast<Symbol>(sample_index(rng, col));
    }
  }
  return out;
}

/// Observation channel of node `side`: p(u | x_side) with the other node's
/// input averaged out against `other_input`.
inline ConditionalPmf observation_channel(const MacChannel& ch, const Pmf& other_input,
                                          Side side = Side::One) {
  const Alphabet& own = ch.input(side);
  const Alphabet& oth = ch.input(other(side));
  validate_pmf(other_input, oth.size(), kStochasticTol, "observation_channel other input");

  const std::size_t nu = ch.u().size();
  std::vector<double> table(own.size() * nu, 0.0);
  for (std::size_t a = 0; a < own.size(); ++a) {
    for (std::size_t b = 0; b < oth.size(); ++b) {
      const auto x1 = static_cast<Symbol>(side == Side::One ? a : b);
      const auto x2 = static_cast<Symbol>(side == Side::One ? b : a);
      for (std::size_t u = 0; u < nu; ++u)
        table[a * nu + u] += ch.prob(static_cast<Symbol>(u), x1, x2) * other_input[b];
    }
  }
  return ConditionalPmf(ch.u(), {own}, std::move(table));
}

}  // namespace byzrelay

#endif  // BYZRELAY_CHANNEL_HPP
