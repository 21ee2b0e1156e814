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

#ifndef BYZRELAY_RELAY_HPP
#define BYZRELAY_RELAY_HPP

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "byzrelay/coding.hpp"

namespace byzrelay {

struct Honest {};

/// v_i = map[u_i].
struct DeterministicMap {
  std::vector<Symbol> map;
};

/// v_i ~ kernel(. | u_i) independently.
struct MemorylessSubstitution {
  ConditionalPmf kernel;
};

struct PartialBlockSubstitution;

/// The relay decodes the codeword pair itself and, when it succeeds, replaces
/// the block by a fresh MAC output for shifted messages.
///
/// Pair decoding uses the nodes' rule on (u, x1, x2): a pair is accepted at
/// `accept_tol` and must be the only pair typical at `unique_tol`. On success
/// message w_s is replaced by w_s + offset_s (mod the message count) with a
/// fresh private sub-index; an offset of 0 keeps the decoded codeword.
/// Otherwise the block is forwarded honestly.
struct DecodeAndReforge {
  MacChannel channel;
  std::vector<double> reference;  // joint pmf over (u, x1, x2)
  double accept_tol = 0.0;
  double unique_tol = 0.0;
  IndexMap map1{}, map2{};
  std::uint64_t offset1 = 1, offset2 = 1;
  std::uint64_t max_evaluations = kDefaultMaxEvaluations;
};

using RelayBehavior =
    std::variant<Honest, DeterministicMap, MemorylessSubstitution,
                 std::shared_ptr<const PartialBlockSubstitution>, DecodeAndReforge>;

/// Runs `inner` and keeps its output on the first ceil(fraction n) positions;
/// the rest is forwarded untouched.
struct PartialBlockSubstitution {
  double fraction = 1.0;
  RelayBehavior inner;
};

inline DecodeAndReforge make_decode_and_reforge(const MacChannel& ch, const Pmf& p1, const Pmf& p2,
                                                const ToleranceSchedule& schedule, std::size_t n,
                                                IndexMap map1, IndexMap map2) {
  DecodeAndReforge d;
  d.channel = ch;
  d.reference = joint_from(ch, p1, p2).decoder_reference(Side::One);
  d.accept_tol = schedule.accept_tolerance(n);
  d.unique_tol = schedule.unique_tolerance(n);
  d.map1 = map1;
  d.map2 = map2;
  return d;
}

inline RelayBehavior partial_block(double fraction, RelayBehavior inner) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InputError("partial block fraction must lie in [0, 1]");
  return std::make_shared<const PartialBlockSubstitution>(
      PartialBlockSubstitution{fraction, std::move(inner)});
}

/// What the relay did on one block; filled by relay_forward when requested.
struct RelayTrace {
  bool pair_decoded = false;
  std::uint64_t index1 = 0, index2 = 0;  // decoded codebook indices, 1-based
  std::uint64_t evaluations = 0;
};

inline bool is_honest(const RelayBehavior& b) { return std::holds_alternative<Honest>(b); }

inline std::string describe(const RelayBehavior& b) {
  struct V {
    std::string operator()(const Honest&) const { return "honest"; }
    std::string operator()(const DeterministicMap& m) const {
      std::ostringstream os;
      os << "map(";
      for (std::size_t i = 0; i < m.map.size(); ++i) os << (i ? " " : "") << int(m.map[i]);
      os << ")";
      return os.str();
    }
    std::string operator()(const MemorylessSubstitution&) const { return "substitution"; }
    std::string operator()(const std::shared_ptr<const PartialBlockSubstitution>& p) const {
      std::ostringstream os;
      os << "partial(" << p->fraction << "," << describe(p->inner) << ")";
      return os.str();
    }
    std::string operator()(const DecodeAndReforge& d) const {
      return "reforge(" + std::to_string(d.offset1) + "," + std::to_string(d.offset2) + ")";
    }
  };
  return std::visit(V{}, b);
}

namespace detail {

/// Unique pair search for DecodeAndReforge. Returns the 0-based pair or
/// nullopt when no pair, or more than one, survives.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> relay_pair_search(
    const DecodeAndReforge& d, SequenceView u, const Codebook& cb1, const Codebook& cb2,
    RelayTrace& trace) {
  const std::size_t n = u.size();
  const std::size_t nu = d.channel.u().size(), n1 = d.channel.x1().size(),
                    n2 = d.channel.x2().size();
  const TripleTypicality accept(d.reference, nu, n1, n2, n, d.accept_tol);
  const TripleTypicality unique(d.reference, nu, n1, n2, n, d.unique_tol);

  // A triple typical at tol has its (u, x1) marginal within n2 * tol.
  std::vector<double> ux1(nu * n1, 0.0);
  for (std::size_t k = 0; k < d.reference.size(); ++k) ux1[k / n2] += d.reference[k];
  const double screen_tol = std::min(1.0, static_cast<double>(n2) * d.unique_tol + 1e-12);
  const CountBounds screen(ux1, n, screen_tol);

  WorkBudget budget{0, d.max_evaluations};
  std::vector<std::uint32_t> counts(d.reference.size());
  std::vector<std::uint32_t> mcounts(ux1.size());
  std::optional<std::pair<std::uint64_t, std::uint64_t>> found;
  bool ambiguous = false;
  for (std::uint64_t i = 0; i < cb1.size() && !ambiguous; ++i) {
    budget.charge();
    const Symbol* x1 = cb1.row(i);
    std::fill(mcounts.begin(), mcounts.end(), 0u);
    for (std::size_t t = 0; t < n; ++t) ++mcounts[u[t] * n1 + x1[t]];
    if (!screen.admissible(mcounts)) continue;
    const auto bases = unique.bases(u.data(), x1);
    for (std::uint64_t j = 0; j < cb2.size(); ++j) {
      budget.charge();
      if (!unique.check(bases, cb2.row(j), counts)) continue;
      if (found) {
        ambiguous = true;
        break;
      }
      found = std::make_pair(i, j);
    }
  }
  trace.evaluations = budget.used;
  if (ambiguous || !found) return std::nullopt;
  const auto bases = accept.bases(u.data(), cb1.row(found->first));
  if (!accept.check(bases, cb2.row(found->second), counts)) return std::nullopt;
  return found;
}

inline std::uint64_t shifted_index(std::uint64_t index0, const IndexMap& map, std::uint64_t offset,
                                   Rng& rng) {
  if (offset == 0) return index0 + 1;
  const std::uint64_t w = recover_message(index0 + 1, map);
  const std::uint64_t w_new = (w - 1 + offset) % map.messages() + 1;
  const std::uint64_t sub = map.split_bits == 0 ? 1 : 1 + uniform_below(rng, map.split());
  return (w_new - 1) * map.split() + sub;
}

}  // namespace detail

/// Relay output v^n for observation u^n. Depends on nothing but u^n, the two
/// codebooks and `rng`.
inline Sequence relay_forward(const RelayBehavior& behavior, SequenceView u, const Codebook& cb1,
                              const Codebook& cb2, Rng& rng, std::size_t u_size,
                              RelayTrace* trace = nullptr) {
  for (Symbol s : u)
    if (s >= u_size) throw InputError("relay_forward: symbol outside U");

  struct V {
    SequenceView u;
    const Codebook& cb1;
    const Codebook& cb2;
    Rng& rng;
    std::size_t u_size;
    RelayTrace* trace;

    Sequence operator()(const Honest&) const { return Sequence(u.begin(), u.end()); }
    Sequence operator()(const DeterministicMap& m) const {
      if (m.map.size() != u_size) throw InputError("relay map must cover every symbol of U");
      Sequence v(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (m.map[u[i]] >= u_size) throw InputError("relay map leaves U");
        v[i] = m.map[u[i]];
      }
      return v;
    }
    Sequence operator()(const MemorylessSubstitution& s) const {
      if (s.kernel.num_outputs() != u_size || s.kernel.num_columns() != u_size)
        throw InputError("substitution kernel must be |U| x |U|");
      Sequence v(u.size());
      for (std::size_t i = 0; i < u.size(); ++i)
        v[i] = static_cast<Symbol>(sample_index(rng, s.kernel.column(u[i])));
      return v;
    }
    Sequence operator()(const std::shared_ptr<const PartialBlockSubstitution>& p) const {
      Sequence inner = (*this)(p->inner);
      const auto keep = static_cast<std::size_t>(std::ceil(p->fraction * static_cast<double>(u.size()) - 1e-9));
      Sequence v(u.begin(), u.end());
      std::copy(inner.begin(), inner.begin() + static_cast<std::ptrdiff_t>(std::min(keep, v.size())),
                v.begin());
      return v;
    }
    Sequence operator()(const DecodeAndReforge& d) const {
      if (d.channel.u().size() != u_size) throw InputError("reforge channel alphabet mismatch");
      RelayTrace local;
      RelayTrace& t = trace ? *trace : local;
      const auto pair = detail::relay_pair_search(d, u, cb1, cb2, t);
      if (!pair) return Sequence(u.begin(), u.end());
      t.pair_decoded = true;
      t.index1 = pair->first + 1;
      t.index2 = pair->second + 1;
      const std::uint64_t i1 = detail::shifted_index(pair->first, d.map1, d.offset1, rng);
      const std::uint64_t i2 = detail::shifted_index(pair->second, d.map2, d.offset2, rng);
      return transmit_mac(d.channel, cb1.codeword(i1), cb2.codeword(i2), rng);
    }
    Sequence operator()(const RelayBehavior& b) const { return std::visit(*this, b); }
  };
  return std::visit(V{u, cb1, cb2, rng, u_size, trace}, behavior);
}

}  // namespace byzrelay

#endif  // BYZRELAY_RELAY_HPP
