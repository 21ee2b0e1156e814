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

#ifndef BYZRELAY_PROBABILITY_HPP
#define BYZRELAY_PROBABILITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "byzrelay/error.hpp"

namespace byzrelay {

/// Symbols are small integer indices into an Alphabet. Labels only exist at
/// the I/O boundary.
using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;
using SequenceView = std::span<const Symbol>;

/// Absolute tolerance for every stochasticity check on in-memory tables.
inline constexpr double kStochasticTol = 1e-12;

inline constexpr std::size_t kMaxAlphabetSize = 256;

class Alphabet {
 public:
  Alphabet() : Alphabet(1) {}

  explicit Alphabet(std::size_t size) {
    if (size == 0 || size > kMaxAlphabetSize)
      throw InputError("alphabet size must be in [1, 256], got " + std::to_string(size));
    labels_.reserve(size);
    for (std::size_t i = 0; i < size; ++i) labels_.push_back(std::to_string(i));
  }

  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty() || labels_.size() > kMaxAlphabetSize)
      throw InputError("alphabet must have between 1 and 256 labels");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw InputError("alphabet label must be non-empty");
      if (!seen.insert(l).second) throw InputError("duplicate alphabet label '" + l + "'");
    }
  }

  Alphabet(std::initializer_list<std::string> labels)
      : Alphabet(std::vector<std::string>(labels)) {}

  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] const std::string& label(Symbol s) const { return labels_.at(s); }

  /// Index of a label; throws InputError when absent.
  [[nodiscard]] Symbol index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return static_cast<Symbol>(i);
    throw InputError("unknown symbol label '" + label + "'");
  }

  [[nodiscard]] bool contains(Symbol s) const { return s < labels_.size(); }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> labels_;
};

inline void require_in_alphabet(SequenceView seq, const Alphabet& a, const char* what) {
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (!a.contains(seq[i]))
      throw InputError(std::string(what) + ": symbol " + std::to_string(seq[i]) +
                       " at position " + std::to_string(i) + " outside alphabet of size " +
                       std::to_string(a.size()));
}

/// Probability mass function over a single alphabet, stored densely.
using Pmf = std::vector<double>;

/// Throws InputError unless `p` is a pmf of the given size (entries >= 0,
/// sum 1 within `tol`).
inline void validate_pmf(std::span<const double> p, std::size_t size, double tol = kStochasticTol,
                         const char* what = "pmf") {
  if (p.size() != size)
    throw InputError(std::string(what) + ": expected " + std::to_string(size) + " entries, got " +
                     std::to_string(p.size()));
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError(std::string(what) + ": entries must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw InputError(std::string(what) + ": entries sum to " + std::to_string(sum) + ", not 1");
}

inline Pmf uniform_pmf(std::size_t size) { return Pmf(size, 1.0 / static_cast<double>(size)); }

inline Pmf point_mass(std::size_t size, Symbol at) {
  Pmf p(size, 0.0);
  p.at(at) = 1.0;
  return p;
}

/// Binary pmf (1 - p, p).
inline Pmf bernoulli(double p) { return Pmf{1.0 - p, p}; }

/// Conditional pmf p(out | in_1, ..., in_k), also read as the column-stochastic
/// |out| x |in tuple| matrix. Input tuples are flattened row-major, so for
/// inputs (x1, x2) column index is x1 * |X2| + x2.
class ConditionalPmf {
 public:
  ConditionalPmf() = default;

  /// `table[c * |out| + o]` holds p(o | column c).
  ConditionalPmf(Alphabet output, std::vector<Alphabet> inputs, std::vector<double> table,
                 double tol = kStochasticTol)
      : output_(std::move(output)), inputs_(std::move(inputs)), table_(std::move(table)) {
    if (inputs_.empty()) throw InputError("conditional pmf needs at least one input alphabet");
    if (table_.size() != output_.size() * num_columns())
      throw InputError("conditional pmf table has " + std::to_string(table_.size()) +
                       " entries, expected " + std::to_string(output_.size() * num_columns()));
    for (std::size_t c = 0; c < num_columns(); ++c)
      validate_pmf(column(c), output_.size(), tol, "conditional pmf column");
  }

  /// Build from a matrix given as rows over outputs (`rows[o][c]`), the layout
  /// matrices are usually written in.
  static ConditionalPmf from_rows(const std::vector<std::vector<double>>& rows,
                                  double tol = kStochasticTol) {
    if (rows.empty() || rows.front().empty()) throw InputError("empty matrix");
    const std::size_t m = rows.size();
    const std::size_t k = rows.front().size();
    std::vector<double> table(m * k);
    for (std::size_t o = 0; o < m; ++o) {
      if (rows[o].size() != k) throw InputError("ragged matrix");
      for (std::size_t c = 0; c < k; ++c) table[c * m + o] = rows[o][c];
    }
    return ConditionalPmf(Alphabet(m), {Alphabet(k)}, std::move(table), tol);
  }

  static ConditionalPmf identity(std::size_t size) {
    std::vector<double> table(size * size, 0.0);
    for (std::size_t i = 0; i < size; ++i) table[i * size + i] = 1.0;
    return ConditionalPmf(Alphabet(size), {Alphabet(size)}, std::move(table));
  }

  [[nodiscard]] const Alphabet& output() const { return output_; }
  [[nodiscard]] const std::vector<Alphabet>& inputs() const { return inputs_; }
  [[nodiscard]] std::size_t num_outputs() const { return output_.size(); }
  [[nodiscard]] std::size_t num_columns() const {
    std::size_t k = 1;
    for (const auto& a : inputs_) k *= a.size();
    return k;
  }

  [[nodiscard]] double operator()(std::size_t out, std::size_t col) const {
    return table_[col * output_.size() + out];
  }
  [[nodiscard]] std::span<const double> column(std::size_t col) const {
    return {table_.data() + col * output_.size(), output_.size()};
  }
  [[nodiscard]] const std::vector<double>& table() const { return table_; }

 private:
  Alphabet output_;
  std::vector<Alphabet> inputs_;
  std::vector<double> table_;
};

/// Max-norm distance between two conditional pmfs of equal shape.
inline double max_abs_difference(const ConditionalPmf& a, const ConditionalPmf& b) {
  if (a.table().size() != b.table().size()) throw InputError("shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.table().size(); ++i)
    d = std::max(d, std::abs(a.table()[i] - b.table()[i]));
  return d;
}

}  // namespace byzrelay

#endif  // BYZRELAY_PROBABILITY_HPP
