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

#ifndef BYZRELAY_CODEBOOK_HPP
#define BYZRELAY_CODEBOOK_HPP

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "byzrelay/typicality.hpp"

namespace byzrelay {

inline constexpr std::uint64_t kDefaultMaxCodewords = std::uint64_t{1} << 20;

/// ceil(n R) as an integer bit count; rates that land within 1e-9 of an
/// integer boundary are not pushed over it by rounding noise.
inline unsigned rate_bits(std::size_t n, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InputError("rate must be finite and >= 0");
  const double nr = static_cast<double>(n) * rate;
  const double b = std::ceil(nr - 1e-9);
  if (b > 62) throw ResourceError("rate_bits: " + std::to_string(b) + " bits is out of range");
  return static_cast<unsigned>(std::max(0.0, b));
}

/// 2^bits codewords of length n, each a member of T^n_tol(source). Indices
/// are 1-based throughout the public interface.
class Codebook {
 public:
  Codebook(Alphabet alphabet, Pmf source, std::size_t n, unsigned bits, double tol,
           std::uint64_t seed, std::vector<Symbol> data)
      : alphabet_(std::move(alphabet)),
        source_(std::move(source)),
        n_(n),
        bits_(bits),
        tol_(tol),
        seed_(seed),
        data_(std::move(data)) {
    if (data_.size() != size() * n_) throw InputError("codebook: data size mismatch");
  }

  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] unsigned bits() const { return bits_; }
  [[nodiscard]] std::uint64_t size() const { return std::uint64_t{1} << bits_; }
  /// Rate actually realized, ceil(nR) / n.
  [[nodiscard]] double rate() const { return static_cast<double>(bits_) / static_cast<double>(n_); }
  [[nodiscard]] const Alphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] const Pmf& source() const { return source_; }
  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] SequenceView codeword(std::uint64_t index) const {
    if (index < 1 || index > size())
      throw InputError("codebook index " + std::to_string(index) + " outside [1, " +
                       std::to_string(size()) + "]");
    return {data_.data() + (index - 1) * n_, n_};
  }

  /// Unchecked 0-based access for scan loops.
  [[nodiscard]] const Symbol* row(std::uint64_t zero_based) const {
    return data_.data() + zero_based * n_;
  }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_ && a.data_ == b.data_ &&
           a.alphabet_ == b.alphabet_;
  }

 private:
  Alphabet alphabet_;
  Pmf source_;
  std::size_t n_;
  unsigned bits_;
  double tol_;
  std::uint64_t seed_;
  std::vector<Symbol> data_;
};

/// Draw 2^bits codewords independently and uniformly from T^n_tol(source).
/// Duplicates are allowed.
inline Codebook build_codebook_bits(const Alphabet& alphabet, const Pmf& source, std::size_t n,
                                    unsigned bits, double tol, Rng& rng,
                                    std::uint64_t max_codewords = kDefaultMaxCodewords,
                                    std::uint64_t seed = 0) {
  validate_pmf(source, alphabet.size(), kStochasticTol, "codebook source");
  if (n == 0) throw InputError("build_codebook: n must be positive");
  if (bits >= 63 || (std::uint64_t{1} << bits) > max_codewords)
    throw ResourceError("build_codebook: 2^" + std::to_string(bits) +
                        " codewords exceeds the cap of " + std::to_string(max_codewords));
  const std::uint64_t count = std::uint64_t{1} << bits;
  std::vector<Symbol> data;
  data.reserve(count * n);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto cw = sample_typical(source, n, tol, rng);
    data.insert(data.end(), cw.begin(), cw.end());
  }
  return Codebook(alphabet, source, n, bits, tol, seed, std::move(data));
}

inline Codebook build_codebook(const Alphabet& alphabet, const Pmf& source, std::size_t n,
                               double rate, double tol, Rng& rng,
                               std::uint64_t max_codewords = kDefaultMaxCodewords) {
  return build_codebook_bits(alphabet, source, n, rate_bits(n, rate), tol, rng, max_codewords);
}

/// Seeded variant; the seed is recorded for export.
inline Codebook build_codebook_seeded(const Alphabet& alphabet, const Pmf& source, std::size_t n,
                                      unsigned bits, double tol, std::uint64_t seed,
                                      std::uint64_t max_codewords = kDefaultMaxCodewords) {
  Rng rng(seed);
  return build_codebook_bits(alphabet, source, n, bits, tol, rng, max_codewords, seed);
}

// Codebook text format, version 1:
//
//   byzrelay-codebook 1
//   n <n>
//   rate <bits>/<n>
//   alphabet <label> <label> ...
//   source <p> <p> ...
//   tolerance <tol>
//   seed <seed>
//   codewords <count>
//   <symbol index> <symbol index> ...     (count lines of n indices)
inline constexpr int kCodebookFormatVersion = 1;

inline void write_codebook(std::ostream& os, const Codebook& cb) {
  os << "byzrelay-codebook " << kCodebookFormatVersion << '\n';
  os << "n " << cb.n() << '\n';
  os << "rate " << cb.bits() << '/' << cb.n() << '\n';
  os << "alphabet";
  for (const auto& l : cb.alphabet().labels()) os << ' ' << l;
  os << '\n' << "source";
  os << std::setprecision(17);
  for (double p : cb.source()) os << ' ' << p;
  os << '\n' << "tolerance " << cb.tolerance() << '\n';
  os << "seed " << cb.seed() << '\n';
  os << "codewords " << cb.size() << '\n';
  for (std::uint64_t i = 1; i <= cb.size(); ++i) {
    auto cw = cb.codeword(i);
    for (std::size_t k = 0; k < cw.size(); ++k) os << (k ? " " : "") << static_cast<int>(cw[k]);
    os << '\n';
  }
}

inline Codebook read_codebook(std::istream& is) {
  std::size_t line_no = 0;
  std::string line;
  auto fail = [&](const std::string& msg) -> InputError {
    return InputError("codebook line " + std::to_string(line_no) + ": " + msg);
  };
  auto next = [&](const std::string& key) {
    if (!std::getline(is, line)) {
      ++line_no;
      throw fail("unexpected end of file, expected '" + key + "'");
    }
    ++line_no;
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw fail("expected '" + key + "', got '" + k + "'");
    std::string rest;
    std::getline(ls, rest);
    return rest;
  };

  {
    std::istringstream v(next("byzrelay-codebook"));
    int ver = 0;
    if (!(v >> ver) || ver != kCodebookFormatVersion) throw fail("unsupported format version");
  }
  std::size_t n = 0;
  if (!(std::istringstream(next("n")) >> n) || n == 0) throw fail("bad block length");
  unsigned bits = 0;
  {
    std::string r = next("rate");
    std::istringstream rs(r);
    char slash = 0;
    std::size_t den = 0;
    if (!(rs >> bits >> slash >> den) || slash != '/' || den != n)
      throw fail("rate must be <bits>/<n>");
  }
  std::vector<std::string> labels;
  {
    std::istringstream as(next("alphabet"));
    for (std::string l; as >> l;) labels.push_back(l);
  }
  Alphabet alphabet(labels);
  Pmf source;
  {
    std::istringstream ss(next("source"));
    for (double p; ss >> p;) source.push_back(p);
  }
  try {
    validate_pmf(source, alphabet.size(), 1e-9, "source");
  } catch (const InputError& e) {
    throw fail(e.what());
  }
  double tol = 0.0;
  if (!(std::istringstream(next("tolerance")) >> tol)) throw fail("bad tolerance");
  std::uint64_t seed = 0;
  if (!(std::istringstream(next("seed")) >> seed)) throw fail("bad seed");
  std::uint64_t count = 0;
  if (!(std::istringstream(next("codewords")) >> count) || count != (std::uint64_t{1} << bits))
    throw fail("codeword count must be 2^bits");

  std::vector<Symbol> data;
  data.reserve(count * n);
  const CountBounds bounds(source, n, tol);
  std::vector<std::uint32_t> counts(alphabet.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw fail("missing codewords");
    ++line_no;
    std::istringstream cs(line);
    std::fill(counts.begin(), counts.end(), 0);
    std::size_t k = 0;
    for (int s; cs >> s; ++k) {
      if (s < 0 || static_cast<std::size_t>(s) >= alphabet.size())
        throw fail("symbol " + std::to_string(s) + " outside alphabet");
      data.push_back(static_cast<Symbol>(s));
      ++counts[static_cast<std::size_t>(s)];
    }
    if (k != n) throw fail("codeword has " + std::to_string(k) + " symbols, expected " + std::to_string(n));
    if (!bounds.admissible(counts)) throw fail("codeword is not in the typical set");
  }
  return Codebook(std::move(alphabet), std::move(source), n, bits, tol, seed, std::move(data));
}

}  // namespace byzrelay

#endif  // BYZRELAY_CODEBOOK_HPP
