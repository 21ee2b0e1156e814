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

#ifndef BYZRELAY_CODING_HPP
#define BYZRELAY_CODING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "byzrelay/codebook.hpp"
#include "byzrelay/information.hpp"
#include "byzrelay/rate_plan.hpp"

namespace byzrelay {

struct Encoded {
  Sequence codeword;
  std::uint64_t index = 0;      // codebook index, 1-based
  std::uint64_t sub_index = 0;  // private randomization w', 1-based
};

/// Rate-splitting encoder: w' uniform on {1..2^split_bits}, codebook index
/// (w - 1) 2^split_bits + w'.
inline Encoded encode(const Codebook& cb, const IndexMap& map, std::uint64_t w, Rng& rng) {
  if (map.codebook_bits() != cb.bits())
    throw InputError("encode: index map needs 2^" + std::to_string(map.codebook_bits()) +
                     " codewords, codebook has 2^" + std::to_string(cb.bits()));
  if (w < 1 || w > map.messages())
    throw InputError("encode: message " + std::to_string(w) + " outside [1, " +
                     std::to_string(map.messages()) + "]");
  Encoded e;
  e.sub_index = map.split_bits == 0 ? 1 : 1 + uniform_below(rng, map.split());
  e.index = (w - 1) * map.split() + e.sub_index;
  auto cw = cb.codeword(e.index);
  e.codeword.assign(cw.begin(), cw.end());
  return e;
}

/// Inverse of the encoder's index map: w = ceil(index / 2^split_bits).
inline std::uint64_t recover_message(std::uint64_t index, const IndexMap& map) {
  const std::uint64_t total = std::uint64_t{1} << map.codebook_bits();
  if (index < 1 || index > total)
    throw InputError("recover_message: index " + std::to_string(index) + " outside [1, " +
                     std::to_string(total) + "]");
  return (index - 1) / map.split() + 1;
}

/// Decoder output: a codebook index, or the untrusted symbol "!".
class Verdict {
 public:
  static Verdict decoded(std::uint64_t index) { return Verdict(index); }
  static Verdict untrusted() { return Verdict(0); }

  [[nodiscard]] bool is_untrusted() const { return index_ == 0; }
  [[nodiscard]] bool is_decoded() const { return index_ != 0; }
  /// Decoded index; only meaningful when is_decoded().
  [[nodiscard]] std::uint64_t index() const { return index_; }

  [[nodiscard]] std::string str() const {
    return is_untrusted() ? std::string("!") : std::to_string(index_);
  }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  explicit Verdict(std::uint64_t i) : index_(i) {}
  std::uint64_t index_;
};

/// Running count of candidate typicality evaluations, checked against a cap.
struct WorkBudget {
  std::uint64_t used = 0;
  std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();

  void charge(std::uint64_t k = 1) {
    used += k;
    if (used > cap)
      throw ResourceError("decoder work cap of " + std::to_string(cap) +
                          " candidate evaluations exceeded");
  }
};

inline constexpr std::uint64_t kDefaultMaxEvaluations = std::uint64_t{1} << 24;

/// Joint-typicality test of (u^n, a^n, b^n) against a reference pmf over the
/// flattened (u, a, b) alphabet. Count windows are precomputed so a candidate
/// can be rejected as soon as any cell count overshoots.
class TripleTypicality {
 public:
  TripleTypicality(std::vector<double> reference, std::size_t u_size, std::size_t a_size,
                   std::size_t b_size, std::size_t n, double tol)
      : reference_(std::move(reference)),
        nu_(u_size),
        na_(a_size),
        nb_(b_size),
        n_(n),
        tol_(tol),
        bounds_(reference_, n, tol) {
    if (reference_.size() != nu_ * na_ * nb_) throw InputError("TripleTypicality: shape mismatch");
    validate_pmf(reference_, reference_.size(), 1e-9, "typicality reference");
  }

  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t b_size() const { return nb_; }
  [[nodiscard]] const std::vector<double>& reference() const { return reference_; }

  /// Base cell offsets (u_i * |A| + a_i) * |B| for a fixed (u^n, a^n).
  [[nodiscard]] std::vector<std::uint32_t> bases(const Symbol* u, const Symbol* a) const {
    std::vector<std::uint32_t> b(n_);
    for (std::size_t i = 0; i < n_; ++i) b[i] = static_cast<std::uint32_t>((u[i] * na_ + a[i]) * nb_);
    return b;
  }

  /// Membership of the candidate b^n given precomputed bases.
  bool check(const std::vector<std::uint32_t>& bases, const Symbol* b,
             std::vector<std::uint32_t>& counts) const {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::uint32_t cell = bases[i] + b[i];
      if (static_cast<std::int64_t>(++counts[cell]) > bounds_.hi[cell]) return false;
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (static_cast<std::int64_t>(counts[c]) < bounds_.lo[c]) return false;
    return true;
  }

  [[nodiscard]] std::size_t cells() const { return reference_.size(); }

 private:
  std::vector<double> reference_;
  std::size_t nu_, na_, nb_, n_;
  double tol_;
  CountBounds bounds_;
};

/// Typicality decoder of one node. The reference pmf is flattened over
/// (u, own input, other input); acceptance uses `accept_tol` (2 mu_n) and the
/// uniqueness screen the looser `unique_tol` (2 nu_n).
///
/// Decoded(w) iff (v, own codeword, other codeword w) is jointly typical at
/// accept_tol and no other index w' != w is jointly typical at unique_tol.
class TypicalityDecoder {
 public:
  TypicalityDecoder(std::vector<double> reference, std::size_t u_size, std::size_t own_size,
                    std::size_t other_size, std::size_t n, double accept_tol, double unique_tol)
      : accept_(reference, u_size, own_size, other_size, n, accept_tol),
        unique_(std::move(reference), u_size, own_size, other_size, n, unique_tol),
        u_size_(u_size),
        own_size_(own_size),
        other_size_(other_size) {
    if (unique_tol < accept_tol)
      throw InputError("TypicalityDecoder: uniqueness tolerance must be >= acceptance tolerance");
  }

  /// Decoder for `side` built from the joint law and a tolerance schedule.
  static TypicalityDecoder for_side(const JointPmf& joint, Side side, std::size_t n,
                                    const ToleranceSchedule& schedule) {
    const std::size_t own = side == Side::One ? joint.x1_size() : joint.x2_size();
    const std::size_t oth = side == Side::One ? joint.x2_size() : joint.x1_size();
    return TypicalityDecoder(joint.decoder_reference(side), joint.u_size(), own, oth, n,
                             schedule.accept_tolerance(n), schedule.unique_tolerance(n));
  }

  [[nodiscard]] double accept_tolerance() const { return accept_.tolerance(); }
  [[nodiscard]] double unique_tolerance() const { return unique_.tolerance(); }

  Verdict decode(SequenceView v, SequenceView own_codeword, const Codebook& other,
                 WorkBudget* budget = nullptr) const {
    const std::size_t n = accept_.n();
    if (v.size() != n || own_codeword.size() != n || other.n() != n)
      throw InputError("decode: block length mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] >= u_size_ || own_codeword[i] >= own_size_)
        throw InputError("decode: symbol outside alphabet");
    if (other.alphabet().size() != other_size_) throw InputError("decode: other alphabet mismatch");

    const auto bases = accept_.bases(v.data(), own_codeword.data());
    std::vector<std::uint32_t> counts(accept_.cells());
    std::optional<std::uint64_t> typical;  // the single unique_tol-typical index seen so far
    for (std::uint64_t k = 0; k < other.size(); ++k) {
      if (budget) budget->charge();
      if (!unique_.check(bases, other.row(k), counts)) continue;
      if (typical) return Verdict::untrusted();
      typical = k;
    }
    // accept_tol <= unique_tol, so the accept-typical set sits inside the
    // unique-typical one; a single survivor decodes iff it also passes the
    // tighter acceptance test.
    if (typical && accept_.check(bases, other.row(*typical), counts))
      return Verdict::decoded(*typical + 1);
    return Verdict::untrusted();
  }

  /// Decode from node-side quantities: own message index selects the own codeword.
  Verdict decode(SequenceView v, std::uint64_t own_index, const Codebook& own,
                 const Codebook& other, WorkBudget* budget = nullptr) const {
    return decode(v, own.codeword(own_index), other, budget);
  }

 private:
  TripleTypicality accept_;
  TripleTypicality unique_;
  std::size_t u_size_, own_size_, other_size_;
};

/// One-shot decode for node `side` using the schedule's tolerances.
inline Verdict decode(SequenceView v, std::uint64_t own_index, const Codebook& own,
                      const Codebook& other, const JointPmf& joint, Side side,
                      const ToleranceSchedule& schedule) {
  return TypicalityDecoder::for_side(joint, side, v.size(), schedule)
      .decode(v, own_index, own, other);
}

}  // namespace byzrelay

#endif  // BYZRELAY_CODING_HPP
