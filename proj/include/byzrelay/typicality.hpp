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

#ifndef BYZRELAY_TYPICALITY_HPP
#define BYZRELAY_TYPICALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "byzrelay/probability.hpp"
#include "byzrelay/random.hpp"

namespace byzrelay {

/// Slack added to every closed typicality inequality so that boundary cases
/// such as |0.6 - 0.5| <= 0.1 are not lost to rounding.
inline constexpr double kTypicalitySlack = 1e-12;

/// Joint type of one or more aligned sequences: counts of every symbol tuple,
/// flattened row-major over `dims`.
class EmpiricalPmf {
 public:
  EmpiricalPmf(std::vector<std::size_t> dims, std::vector<std::uint64_t> counts, std::uint64_t n)
      : dims_(std::move(dims)), counts_(std::move(counts)), n_(n) {
    if (counts_.size() != num_cells()) throw InputError("EmpiricalPmf: count table shape mismatch");
    if (std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}) != n_)
      throw InputError("EmpiricalPmf: counts do not sum to n");
  }

  [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
  [[nodiscard]] const std::vector<std::uint64_t>& counts() const { return counts_; }
  [[nodiscard]] std::uint64_t n() const { return n_; }
  [[nodiscard]] std::size_t num_cells() const {
    std::size_t k = 1;
    for (auto d : dims_) k *= d;
    return k;
  }

  [[nodiscard]] std::size_t flat_index(std::span<const Symbol> tuple) const {
    if (tuple.size() != dims_.size()) throw InputError("EmpiricalPmf: tuple arity mismatch");
    std::size_t idx = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      if (tuple[a] >= dims_[a]) throw InputError("EmpiricalPmf: symbol out of range");
      idx = idx * dims_[a] + tuple[a];
    }
    return idx;
  }

  [[nodiscard]] std::uint64_t count(std::initializer_list<Symbol> tuple) const {
    return counts_[flat_index(std::span<const Symbol>(tuple.begin(), tuple.size()))];
  }
  [[nodiscard]] double frequency(std::initializer_list<Symbol> tuple) const {
    return static_cast<double>(count(tuple)) / static_cast<double>(n_);
  }
  [[nodiscard]] std::vector<double> frequencies() const {
    std::vector<double> f(counts_.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      f[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
    return f;
  }

  /// Joint type of the axes in `keep`, in the given order.
  [[nodiscard]] EmpiricalPmf marginal(const std::vector<std::size_t>& keep) const {
    std::vector<std::size_t> mdims;
    for (auto a : keep) mdims.push_back(dims_.at(a));
    std::size_t mcells = 1;
    for (auto d : mdims) mcells *= d;
    std::vector<std::uint64_t> mcounts(mcells, 0);
    std::vector<std::size_t> tuple(dims_.size(), 0);
    for (std::size_t flat = 0; flat < counts_.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t a = dims_.size(); a-- > 0;) {
        tuple[a] = rem % dims_[a];
        rem /= dims_[a];
      }
      std::size_t m = 0;
      for (std::size_t k = 0; k < keep.size(); ++k) m = m * mdims[k] + tuple[keep[k]];
      mcounts[m] += counts_[flat];
    }
    return EmpiricalPmf(std::move(mdims), std::move(mcounts), n_);
  }

  /// Pt(x | y) for a two-axis type (x on axis 0, y on axis 1). The
  /// conditioning symbol must occur at least once.
  [[nodiscard]] double conditional(Symbol x, Symbol y) const {
    if (dims_.size() != 2) throw InputError("conditional needs a two-axis type");
    if (x >= dims_[0] || y >= dims_[1]) throw InputError("conditional: symbol outside alphabet");
    std::uint64_t cy = 0;
    for (std::size_t a = 0; a < dims_[0]; ++a) cy += counts_[a * dims_[1] + y];
    if (cy == 0) throw InputError("conditional: conditioning symbol never occurs");
    return static_cast<double>(counts_[x * dims_[1] + y]) / static_cast<double>(cy);
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_;
};

/// Joint type of aligned sequences; `sizes[k]` is the alphabet size of seqs[k].
inline EmpiricalPmf empirical_pmf(const std::vector<SequenceView>& seqs,
                                  const std::vector<std::size_t>& sizes) {
  if (seqs.empty() || seqs.size() != sizes.size())
    throw InputError("empirical_pmf: need one alphabet size per sequence");
  const std::size_t n = seqs.front().size();
  if (n == 0) throw InputError("empirical_pmf: sequences must be non-empty");
  for (const auto& s : seqs)
    if (s.size() != n) throw InputError("empirical_pmf: sequence lengths differ");
  std::size_t cells = 1;
  for (auto d : sizes) cells *= d;
  std::vector<std::uint64_t> counts(cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      if (seqs[k][i] >= sizes[k]) throw InputError("empirical_pmf: symbol outside alphabet");
      idx = idx * sizes[k] + seqs[k][i];
    }
    ++counts[idx];
  }
  return EmpiricalPmf(sizes, std::move(counts), n);
}

inline EmpiricalPmf empirical_pmf(SequenceView seq, std::size_t size) {
  return empirical_pmf(std::vector<SequenceView>{seq}, {size});
}

/// The per-entry membership test |count/n - P| <= tol, closed.
inline bool within_tolerance(std::uint64_t count, std::uint64_t n, double p, double tol) {
  return std::abs(static_cast<double>(count) / static_cast<double>(n) - p) <=
         tol + kTypicalitySlack;
}

/// True iff every entry of the type lies within `tol` of `reference`.
inline bool is_typical(const EmpiricalPmf& type, std::span<const double> reference, double tol) {
  if (reference.size() != type.num_cells())
    throw InputError("is_typical: reference pmf shape mismatch");
  for (std::size_t i = 0; i < reference.size(); ++i)
    if (!within_tolerance(type.counts()[i], type.n(), reference[i], tol)) return false;
  return true;
}

inline bool is_typical(SequenceView seq, std::span<const double> reference, double tol) {
  return is_typical(empirical_pmf(seq, reference.size()), reference, tol);
}

/// Integer count window [lo, hi] per cell, derived from `within_tolerance`
/// itself so that hot loops agree bit-for-bit with `is_typical`.
struct CountBounds {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;  // -1 when no count is admissible

  CountBounds(std::span<const double> reference, std::uint64_t n, double tol) {
    lo.resize(reference.size());
    hi.resize(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
      std::int64_t l = -1, h = -1;
      for (std::uint64_t c = 0; c <= n; ++c) {
        if (within_tolerance(c, n, reference[i], tol)) {
          if (l < 0) l = static_cast<std::int64_t>(c);
          h = static_cast<std::int64_t>(c);
        }
      }
      lo[i] = l < 0 ? static_cast<std::int64_t>(n) + 1 : l;
      hi[i] = h;
    }
  }

  [[nodiscard]] bool admissible(std::span<const std::uint32_t> counts) const {
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] < lo[i] || static_cast<std::int64_t>(counts[i]) > hi[i]) return false;
    return true;
  }
};

/// Number of i.i.d. attempts before `sample_typical` falls back to type
/// quantization.
inline constexpr int kTypicalRejectionCap = 10'000;

namespace detail {

inline Sequence permuted_composition(const std::vector<std::int64_t>& counts, Rng& rng) {
  Sequence seq;
  for (std::size_t x = 0; x < counts.size(); ++x)
    seq.insert(seq.end(), static_cast<std::size_t>(counts[x]), static_cast<Symbol>(x));
  for (std::size_t i = seq.size(); i > 1; --i)
    std::swap(seq[i - 1], seq[uniform_below(rng, i)]);
  return seq;
}

/// Largest-remainder rounding of n * P.
inline std::vector<std::int64_t> quantize_type(std::span<const double> p, std::size_t n) {
  std::vector<std::int64_t> c(p.size());
  std::vector<std::pair<double, std::size_t>> rema;
  std::int64_t total = 0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    const double t = p[x] * static_cast<double>(n);
    c[x] = static_cast<std::int64_t>(std::floor(t));
    total += c[x];
    rema.emplace_back(t - std::floor(t), x);
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; total < static_cast<std::int64_t>(n); ++k, ++total)
    ++c[rema[k % rema.size()].second];
  return c;
}

}  // namespace detail

/// Draw a member of the typical set T^n_tol(P).
///
/// Up to kTypicalRejectionCap i.i.d. draws are tried; an attempt is abandoned
/// as soon as it can no longer land in the set, which leaves the accepted
/// distribution exactly uniform over the set. After the cap, the quantized
/// type round(n P) is checked and a uniform permutation of it returned, which
/// is only approximately uniform over the set.
inline Sequence sample_typical(const Pmf& p, std::size_t n, double tol, Rng& rng,
                               int attempts = kTypicalRejectionCap) {
  validate_pmf(p, p.size(), kStochasticTol, "sample_typical");
  if (n == 0) throw InputError("sample_typical: n must be positive");
  const CountBounds bounds(p, n, tol);

  std::vector<std::int64_t> counts(p.size());
  Sequence seq(n);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::fill(counts.begin(), counts.end(), 0);
    std::int64_t deficit = 0;
    for (auto l : bounds.lo) deficit += l;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto s = sample_index(rng, p);
      seq[i] = static_cast<Symbol>(s);
      if (counts[s] < bounds.lo[s]) --deficit;
      if (++counts[s] > bounds.hi[s]) ok = false;
      if (deficit > static_cast<std::int64_t>(n - i - 1)) ok = false;
    }
    if (ok) return seq;
  }

  auto q = detail::quantize_type(p, n);
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] < bounds.lo[x] || q[x] > bounds.hi[x])
      throw SamplingError("sample_typical: " + std::to_string(attempts) +
                          " rejection attempts failed and quantized type of n=" +
                          std::to_string(n) + " misses tolerance " + std::to_string(tol) +
                          " at symbol " + std::to_string(x) + "; typical set likely empty");
  }
  return detail::permuted_composition(q, rng);
}

/// Tolerance sequences used by coding, decoding and the attack diagnostic.
///
///   delta(n)  = delta_scale * n^-delta_exponent
///   mu(n)     = mu_factor * delta(n)
///   lambda(n) = lambda_scale * n^-lambda_exponent
///   nu(n)     = max(mu(n), k_tilde * sqrt(lambda(n)))
///
/// The derived tolerances mu', mu'', mu~ and mu^ are fixed multiples of mu.
/// Every tolerance handed to a typicality test is clamped to 1, since a type
/// never deviates from a pmf by more than that.
struct ToleranceSchedule {
  double delta_scale = 1.0;
  double delta_exponent = 1.0 / 3.0;
  double mu_factor = 1.0;
  double k_tilde = 1.0;
  double lambda_scale = 1.0;
  double lambda_exponent = 0.25;
  double mu_prime_mult = 2.0;
  double mu_double_prime_mult = 3.0;
  double mu_tilde_mult = 2.0;
  double mu_hat_mult = 2.0;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InputError(std::string("schedule: ") + name + " must be positive");
    };
    positive(delta_scale, "delta_scale");
    positive(mu_factor, "mu_factor");
    positive(lambda_scale, "lambda_scale");
    positive(mu_prime_mult, "mu_prime_mult");
    positive(mu_double_prime_mult, "mu_double_prime_mult");
    positive(mu_tilde_mult, "mu_tilde_mult");
    positive(mu_hat_mult, "mu_hat_mult");
    if (!(k_tilde >= 0.0)) throw InputError("schedule: k_tilde must be nonnegative");
    if (!std::isfinite(delta_exponent) || !std::isfinite(lambda_exponent))
      throw InputError("schedule: exponents must be finite");
  }

  static double clamp(double v) { return std::min(v, 1.0); }
  static double pow_n(std::size_t n, double e) { return std::pow(static_cast<double>(n), -e); }

  [[nodiscard]] double raw_delta(std::size_t n) const { return delta_scale * pow_n(n, delta_exponent); }
  [[nodiscard]] double raw_mu(std::size_t n) const { return mu_factor * raw_delta(n); }
  [[nodiscard]] double raw_lambda(std::size_t n) const {
    return lambda_scale * pow_n(n, lambda_exponent);
  }
  [[nodiscard]] double raw_nu(std::size_t n) const {
    return std::max(raw_mu(n), k_tilde * std::sqrt(raw_lambda(n)));
  }

  [[nodiscard]] double delta(std::size_t n) const { return clamp(raw_delta(n)); }
  [[nodiscard]] double mu(std::size_t n) const { return clamp(raw_mu(n)); }
  [[nodiscard]] double nu(std::size_t n) const { return clamp(raw_nu(n)); }
  [[nodiscard]] double lambda(std::size_t n) const { return raw_lambda(n); }
  [[nodiscard]] double mu_prime(std::size_t n) const { return clamp(mu_prime_mult * raw_mu(n)); }
  [[nodiscard]] double mu_double_prime(std::size_t n) const {
    return clamp(mu_double_prime_mult * raw_mu(n));
  }
  [[nodiscard]] double mu_tilde(std::size_t n) const { return clamp(mu_tilde_mult * raw_mu(n)); }
  [[nodiscard]] double mu_hat(std::size_t n) const { return clamp(mu_hat_mult * raw_mu(n)); }

  /// Decoder acceptance tolerance 2 mu_n.
  [[nodiscard]] double accept_tolerance(std::size_t n) const { return clamp(2.0 * raw_mu(n)); }
  /// Decoder uniqueness tolerance 2 nu_n.
  [[nodiscard]] double unique_tolerance(std::size_t n) const { return clamp(2.0 * raw_nu(n)); }
};

/// delta_n = n^-1/3, mu_n = |U||X1||X2| delta_n, lambda_n = n^-1/4,
/// nu_n = max(mu_n, k_tilde sqrt(lambda_n)).
inline ToleranceSchedule default_schedule(std::size_t u_size, std::size_t x1_size,
                                          std::size_t x2_size, double k_tilde = 1.0) {
  ToleranceSchedule s;
  s.mu_factor = static_cast<double>(u_size * x1_size * x2_size);
  s.k_tilde = k_tilde;
  s.validate();
  return s;
}

}  // namespace byzrelay

#endif  // BYZRELAY_TYPICALITY_HPP
