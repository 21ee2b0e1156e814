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

#ifndef BYZRELAY_EXPERIMENT_HPP
#define BYZRELAY_EXPERIMENT_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "byzrelay/coding.hpp"
#include "byzrelay/min_mi.hpp"
#include "byzrelay/rate_plan.hpp"
#include "byzrelay/relay.hpp"

namespace byzrelay {

/// Relay behavior as configured; resolved into a RelayBehavior per block
/// length because DecodeAndReforge needs the index maps and tolerances.
struct BehaviorSpec {
  std::string kind = "honest";  // honest | map | substitution | witness-attack | partial | reforge
  std::string name;             // output label; defaults to the kind
  std::vector<int> map;                      // map: v = map[u]
  std::vector<std::vector<double>> kernel;   // substitution: kernel[u_in][v_out]
  int side = 1;                              // witness-attack: observation channel side
  double fraction = 1.0;                     // partial
  std::vector<BehaviorSpec> inner;           // partial: exactly one entry
  std::uint64_t offset1 = 1, offset2 = 1;    // reforge

  [[nodiscard]] std::string label() const { return name.empty() ? kind : name; }
  [[nodiscard]] bool honest() const { return kind == "honest"; }
};

enum class RateMode { Plan, Direct };

struct ExperimentConfig {
  std::string channel_ref;  // as written in the config file
  MacChannel channel;
  Pmf p1, p2;
  double r1 = 0.0, r2 = 0.0;
  RateMode rate_mode = RateMode::Plan;
  std::vector<std::size_t> block_lengths;
  std::vector<BehaviorSpec> behaviors{BehaviorSpec{}};
  std::uint64_t trials = 100;
  std::uint64_t trials_per_codebook = 0;  // 0: one codebook pair per block length
  ToleranceSchedule schedule;
  std::uint64_t seed = 1;
  bool classify = false;
  std::uint64_t max_codewords = kDefaultMaxCodewords;
  std::uint64_t max_evaluations = kDefaultMaxEvaluations;
  unsigned threads = 1;

  [[nodiscard]] std::size_t num_cells() const { return block_lengths.size() * behaviors.size(); }
  [[nodiscard]] std::uint64_t batch_of(std::uint64_t trial) const {
    return trials_per_codebook == 0 ? 0 : trial / trials_per_codebook;
  }
};

inline RatePlan make_plan(const ExperimentConfig& c) {
  return c.rate_mode == RateMode::Plan ? plan_rates(c.channel, c.p1, c.p2, c.r1, c.r2)
                                       : direct_rates(c.channel, c.p1, c.p2, c.r1, c.r2);
}

inline RelayBehavior resolve_behavior(const BehaviorSpec& b, const ExperimentConfig& c,
                                      std::size_t n, IndexMap map1, IndexMap map2);

/// Throws InputError on malformed configs and ResourceError when a codebook
/// would exceed the cap.
inline void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw InputError("config: trials must be at least 1");
  if (c.block_lengths.empty()) throw InputError("config: block_lengths must be non-empty");
  for (auto n : c.block_lengths)
    if (n < 1) throw InputError("config: block lengths must be positive");
  if (c.behaviors.empty()) throw InputError("config: at least one behavior is required");
  if (c.threads < 1) throw InputError("config: threads must be at least 1");
  validate_pmf(c.p1, c.channel.x1().size(), kStochasticTol, "config p1");
  validate_pmf(c.p2, c.channel.x2().size(), kStochasticTol, "config p2");
  c.schedule.validate();
  const auto plan = make_plan(c);
  for (auto n : c.block_lengths)
    for (Side s : {Side::One, Side::Two}) {
      const unsigned bits = plan.index_map(s, n).codebook_bits();
      if (bits >= 63 || (std::uint64_t{1} << bits) > c.max_codewords)
        throw ResourceError("config: codebook of 2^" + std::to_string(bits) + " codewords at n=" +
                            std::to_string(n) + " exceeds the cap of " +
                            std::to_string(c.max_codewords));
    }
  const std::size_t n0 = c.block_lengths.front();
  for (const auto& b : c.behaviors)
    (void)resolve_behavior(b, c, n0, plan.index_map(Side::One, n0), plan.index_map(Side::Two, n0));
}

inline RelayBehavior resolve_behavior(const BehaviorSpec& b, const ExperimentConfig& c,
                                      std::size_t n, IndexMap map1, IndexMap map2) {
  const std::size_t m = c.channel.u().size();
  if (b.kind == "honest") return Honest{};
  if (b.kind == "map") {
    if (b.map.size() != m) throw InputError("behavior map must list one image per U symbol");
    DeterministicMap d;
    for (int s : b.map) {
      if (s < 0 || static_cast<std::size_t>(s) >= m) throw InputError("behavior map leaves U");
      d.map.push_back(static_cast<Symbol>(s));
    }
    return d;
  }
  if (b.kind == "substitution") {
    if (b.kernel.size() != m) throw InputError("substitution kernel needs |U| rows");
    std::vector<double> t;
    for (const auto& row : b.kernel) {
      if (row.size() != m) throw InputError("substitution kernel rows need |U| entries");
      t.insert(t.end(), row.begin(), row.end());
    }
    return MemorylessSubstitution{ConditionalPmf(c.channel.u(), {c.channel.u()}, std::move(t), 1e-9)};
  }
  if (b.kind == "witness-attack") {
    if (b.side != 1 && b.side != 2) throw InputError("witness-attack side must be 1 or 2");
    const Side s = b.side == 1 ? Side::One : Side::Two;
    const auto p_obs = observation_channel(c.channel, s == Side::One ? c.p2 : c.p1, s);
    const auto w = find_witness(p_obs, ConditionalPmf::identity(m));
    if (!w)
      throw InputError("witness-attack: observation channel of side " + std::to_string(b.side) +
                       " is not manipulable");
    return MemorylessSubstitution{witness_to_attack(*w, p_obs)};
  }
  if (b.kind == "partial") {
    if (b.inner.size() != 1) throw InputError("partial behavior needs exactly one inner behavior");
    return partial_block(b.fraction, resolve_behavior(b.inner.front(), c, n, map1, map2));
  }
  if (b.kind == "reforge") {
    auto d = make_decode_and_reforge(c.channel, c.p1, c.p2, c.schedule, n, map1, map2);
    d.offset1 = b.offset1;
    d.offset2 = b.offset2;
    d.max_evaluations = c.max_evaluations;
    return d;
  }
  throw InputError("unknown behavior kind '" + b.kind + "'");
}

enum class Hypothesis { H0, H1 };
inline const char* to_string(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

struct TrialResult {
  std::size_t n = 0;
  std::size_t behavior = 0;
  std::uint64_t trial = 0, batch = 0;
  Hypothesis hypothesis = Hypothesis::H0;
  std::uint64_t w1 = 0, w2 = 0;
  Verdict verdict1 = Verdict::untrusted();  // node 1's estimate of node 2's codeword index
  Verdict verdict2 = Verdict::untrusted();
  std::uint64_t w2_hat = 0, w1_hat = 0;  // recovered messages, 0 for "!"
  bool correct1 = false, correct2 = false;
  bool error = false;      // H0: not both correct; H1: some node decoded a wrong message
  bool wrong = false;      // some node decoded a wrong message
  bool untrusted = false;  // some node returned "!"
  std::optional<WindowClass> window;
  bool relay_decoded = false;
  std::uint64_t trial_seed = 0, relay_seed = 0, codebook_seed1 = 0, codebook_seed2 = 0;
  bool skipped = false;
  std::string skip_reason;
};

/// Everything a trial needs that depends only on (config, block length).
struct BlockSetup {
  std::size_t n = 0;
  IndexMap map1{}, map2{};
  double codebook_tol = 0.0;
  TypicalityDecoder dec1, dec2;
  ConditionalPmf x1_given_u;
  std::vector<RelayBehavior> behaviors;

  BlockSetup(const ExperimentConfig& c, const RatePlan& plan, std::size_t n_)
      : n(n_),
        map1(plan.index_map(Side::One, n_)),
        map2(plan.index_map(Side::Two, n_)),
        codebook_tol(c.schedule.delta(n_)),
        dec1(TypicalityDecoder::for_side(joint_from(c.channel, c.p1, c.p2), Side::One, n_, c.schedule)),
        dec2(TypicalityDecoder::for_side(joint_from(c.channel, c.p1, c.p2), Side::Two, n_, c.schedule)),
        x1_given_u(joint_from(c.channel, c.p1, c.p2).x1_given_u()) {
    for (const auto& b : c.behaviors) behaviors.push_back(resolve_behavior(b, c, n_, map1, map2));
  }
};

struct CodebookPair {
  Codebook cb1, cb2;
};

inline std::uint64_t codebook_seed(const ExperimentConfig& c, std::size_t n, std::uint64_t batch,
                                   Side s) {
  return derive_seed(c.seed, {n, batch, s == Side::One ? 1u : 2u});
}

inline CodebookPair make_codebooks(const ExperimentConfig& c, const BlockSetup& b,
                                   std::uint64_t batch) {
  return {build_codebook_seeded(c.channel.x1(), c.p1, b.n, b.map1.codebook_bits(), b.codebook_tol,
                                codebook_seed(c, b.n, batch, Side::One), c.max_codewords),
          build_codebook_seeded(c.channel.x2(), c.p2, b.n, b.map2.codebook_bits(), b.codebook_tol,
                                codebook_seed(c, b.n, batch, Side::Two), c.max_codewords)};
}

/// One trial with prebuilt block setup and codebooks. A deterministic function
/// of (config, block length, behavior, trial).
inline TrialResult run_trial_prepared(const ExperimentConfig& c, const BlockSetup& b,
                                      const CodebookPair& cbs, std::size_t behavior,
                                      std::uint64_t trial) {
  TrialResult r;
  r.n = b.n;
  r.behavior = behavior;
  r.trial = trial;
  r.batch = c.batch_of(trial);
  r.hypothesis = c.behaviors[behavior].honest() ? Hypothesis::H0 : Hypothesis::H1;
  r.trial_seed = derive_seed(c.seed, {b.n, trial, 3});
  r.relay_seed = derive_seed(c.seed, {b.n, trial, 4});
  r.codebook_seed1 = cbs.cb1.seed();
  r.codebook_seed2 = cbs.cb2.seed();

  Rng rng(r.trial_seed);
  r.w1 = 1 + uniform_below(rng, b.map1.messages());
  r.w2 = 1 + uniform_below(rng, b.map2.messages());
  const auto e1 = encode(cbs.cb1, b.map1, r.w1, rng);
  const auto e2 = encode(cbs.cb2, b.map2, r.w2, rng);
  const auto u = transmit_mac(c.channel, e1.codeword, e2.codeword, rng);

  try {
    Rng relay_rng(r.relay_seed);
    RelayTrace trace;
    const auto v = relay_forward(b.behaviors[behavior], u, cbs.cb1, cbs.cb2, relay_rng,
                                 c.channel.u().size(), &trace);
    r.relay_decoded = trace.pair_decoded;

    WorkBudget budget1{0, c.max_evaluations}, budget2{0, c.max_evaluations};
    r.verdict1 = b.dec1.decode(v, e1.codeword, cbs.cb2, &budget1);
    r.verdict2 = b.dec2.decode(v, e2.codeword, cbs.cb1, &budget2);
    if (c.classify)
      r.window = classify_window(u, v, b.x1_given_u, c.schedule);
  } catch (const ResourceError& e) {
    r.skipped = true;
    r.skip_reason = e.what();
    return r;
  }

  if (r.verdict1.is_decoded()) r.w2_hat = recover_message(r.verdict1.index(), b.map2);
  if (r.verdict2.is_decoded()) r.w1_hat = recover_message(r.verdict2.index(), b.map1);
  r.correct1 = r.w2_hat == r.w2;
  r.correct2 = r.w1_hat == r.w1;
  const bool wrong1 = r.verdict1.is_decoded() && !r.correct1;
  const bool wrong2 = r.verdict2.is_decoded() && !r.correct2;
  r.wrong = wrong1 || wrong2;
  r.untrusted = r.verdict1.is_untrusted() || r.verdict2.is_untrusted();
  r.error = r.hypothesis == Hypothesis::H0 ? !(r.correct1 && r.correct2) : r.wrong;
  return r;
}

/// Standalone replay of a single trial; cell = block length index *
/// |behaviors| + behavior index.
inline TrialResult run_trial(const ExperimentConfig& c, std::size_t cell, std::uint64_t trial) {
  validate(c);
  if (cell >= c.num_cells()) throw InputError("run_trial: cell index out of range");
  if (trial >= c.trials) throw InputError("run_trial: trial index out of range");
  const auto plan = make_plan(c);
  const BlockSetup b(c, plan, c.block_lengths[cell / c.behaviors.size()]);
  const auto cbs = make_codebooks(c, b, c.batch_of(trial));
  return run_trial_prepared(c, b, cbs, cell % c.behaviors.size(), trial);
}

/// Wilson score interval at 95%.
struct Interval {
  double lo = std::nan(""), hi = std::nan("");
};

inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct CellSummary {
  std::size_t n = 0;
  std::size_t behavior = 0;
  std::string behavior_label;
  Hypothesis hypothesis = Hypothesis::H0;
  std::uint64_t trials = 0;  // completed (not skipped)
  std::uint64_t skipped = 0;
  std::uint64_t errors = 0, wrong = 0, untrusted = 0, e1 = 0, relay_decoded = 0;
  unsigned bits1 = 0, bits2 = 0, split1 = 0, split2 = 0;
  std::optional<TrialResult> first_flagged;  // first trial with error set
  std::string first_skip_reason;

  void add(const TrialResult& r) {
    if (r.skipped) {
      if (skipped++ == 0) first_skip_reason = r.skip_reason;
      return;
    }
    ++trials;
    errors += r.error;
    wrong += r.wrong;
    untrusted += r.untrusted;
    e1 += r.window && *r.window == WindowClass::E1;
    relay_decoded += r.relay_decoded;
    if (r.error && !first_flagged) first_flagged = r;
  }

  [[nodiscard]] double rate(std::uint64_t k) const {
    return trials == 0 ? std::nan("") : static_cast<double>(k) / static_cast<double>(trials);
  }
  [[nodiscard]] double error_rate() const { return rate(errors); }
  [[nodiscard]] double wrong_rate() const { return rate(wrong); }
  [[nodiscard]] double untrusted_rate() const { return rate(untrusted); }
};

struct ExperimentResult {
  RatePlan plan;
  std::vector<CellSummary> cells;
  std::vector<TrialResult> log;  // filled only when requested

  [[nodiscard]] const CellSummary& cell(std::size_t n, const std::string& behavior) const {
    for (const auto& c : cells)
      if (c.n == n && c.behavior_label == behavior) return c;
    throw InputError("no cell for n=" + std::to_string(n) + ", behavior " + behavior);
  }
};

/// Runs every (block length, behavior) cell. Codebooks are shared across the
/// behaviors of one block length and batch, and each trial's randomness
/// depends only on (seed, n, trial), so behaviors are compared on common
/// random numbers. Results are aggregated in trial order, so the output does
/// not depend on `threads`.
inline ExperimentResult run_experiment(const ExperimentConfig& c, bool keep_log = false) {
  validate(c);
  ExperimentResult out;
  out.plan = make_plan(c);
  for (auto n : c.block_lengths) {
    const BlockSetup b(c, out.plan, n);
    std::vector<CellSummary> cells(c.behaviors.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      cells[k].n = n;
      cells[k].behavior = k;
      cells[k].behavior_label = c.behaviors[k].label();
      cells[k].hypothesis = c.behaviors[k].honest() ? Hypothesis::H0 : Hypothesis::H1;
      cells[k].bits1 = b.map1.codebook_bits();
      cells[k].bits2 = b.map2.codebook_bits();
      cells[k].split1 = b.map1.split_bits;
      cells[k].split2 = b.map2.split_bits;
    }
    const std::uint64_t per_batch = c.trials_per_codebook == 0 ? c.trials : c.trials_per_codebook;
    for (std::uint64_t start = 0; start < c.trials; start += per_batch) {
      const std::uint64_t end = std::min(c.trials, start + per_batch);
      const auto cbs = make_codebooks(c, b, c.batch_of(start));
      for (std::size_t k = 0; k < cells.size(); ++k) {
        std::vector<TrialResult> results(end - start);
        auto work = [&](unsigned tid) {
          for (std::uint64_t t = start + tid; t < end; t += c.threads)
            results[t - start] = run_trial_prepared(c, b, cbs, k, t);
        };
        if (c.threads == 1) {
          work(0);
        } else {
          std::vector<std::thread> pool;
          for (unsigned t = 0; t < c.threads; ++t) pool.emplace_back(work, t);
          for (auto& th : pool) th.join();
        }
        for (auto& r : results) {
          cells[k].add(r);
          if (keep_log) out.log.push_back(std::move(r));
        }
      }
    }
    for (auto& cs : cells) out.cells.push_back(std::move(cs));
  }
  return out;
}

inline constexpr int kResultsFormatVersion = 1;

namespace detail {
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace detail

/// Per-cell table. Each row carries the seeds that replay its first flagged
/// trial (trial index, trial seed, relay seed and both codebook seeds).
inline void write_results(std::ostream& os, const ExperimentConfig& c, const ExperimentResult& r) {
  using detail::fmt;
  os << "# byzrelay-results " << kResultsFormatVersion << '\n';
  os << "# channel=" << c.channel_ref << " seed=" << c.seed << " trials=" << c.trials
     << " trials_per_codebook=" << c.trials_per_codebook << '\n';
  os << "# rates r1=" << fmt(r.plan.r1) << " r2=" << fmt(r.plan.r2) << " r1_op=" << fmt(r.plan.r1_op)
     << " r2_op=" << fmt(r.plan.r2_op) << '\n';
  for (auto n : c.block_lengths)
    os << "# schedule n=" << n << " delta=" << fmt(c.schedule.delta(n))
       << " accept_tol=" << fmt(c.schedule.accept_tolerance(n))
       << " unique_tol=" << fmt(c.schedule.unique_tolerance(n))
       << " lambda=" << fmt(c.schedule.lambda(n)) << " mu_tilde=" << fmt(c.schedule.mu_tilde(n))
       << '\n';
  os << "n,behavior,hypothesis,trials,skipped,error_rate,error_lo,error_hi,wrong_rate,wrong_lo,"
        "wrong_hi,untrusted_rate,untrusted_lo,untrusted_hi,e1_rate,relay_decoded_rate,bits1,bits2,"
        "split1,split2,flag_trial,flag_trial_seed,flag_relay_seed,flag_codebook_seed1,"
        "flag_codebook_seed2,skip_reason\n";
  for (const auto& s : r.cells) {
    const auto ei = wilson_interval(s.errors, s.trials);
    const auto wi = wilson_interval(s.wrong, s.trials);
    const auto ui = wilson_interval(s.untrusted, s.trials);
    os << s.n << ',' << s.behavior_label << ',' << to_string(s.hypothesis) << ',' << s.trials << ','
       << s.skipped << ',' << fmt(s.error_rate()) << ',' << fmt(ei.lo) << ',' << fmt(ei.hi) << ','
       << fmt(s.wrong_rate()) << ',' << fmt(wi.lo) << ',' << fmt(wi.hi) << ','
       << fmt(s.untrusted_rate()) << ',' << fmt(ui.lo) << ',' << fmt(ui.hi) << ','
       << (c.classify ? fmt(s.rate(s.e1)) : std::string("nan")) << ','
       << fmt(s.rate(s.relay_decoded)) << ',' << s.bits1 << ',' << s.bits2 << ',' << s.split1
       << ',' << s.split2 << ',';
    if (s.first_flagged) {
      const auto& f = *s.first_flagged;
      os << f.trial << ',' << f.trial_seed << ',' << f.relay_seed << ',' << f.codebook_seed1 << ','
         << f.codebook_seed2;
    } else {
      os << ",,,,";
    }
    std::string reason = s.first_skip_reason;
    for (auto& ch : reason)
      if (ch == ',' || ch == '\n') ch = ';';
    os << ',' << reason << '\n';
  }
}

/// Per-trial event log.
inline void write_event_log(std::ostream& os, const ExperimentConfig& c,
                            const std::vector<TrialResult>& log) {
  os << "# byzrelay-events " << kResultsFormatVersion << '\n';
  os << "n,behavior,trial,batch,hypothesis,w1,w2,verdict1,verdict2,w2_hat,w1_hat,error,wrong,"
        "untrusted,window,relay_decoded,trial_seed,relay_seed,codebook_seed1,codebook_seed2,"
        "skipped\n";
  for (const auto& r : log) {
    os << r.n << ',' << c.behaviors[r.behavior].label() << ',' << r.trial << ',' << r.batch << ','
       << to_string(r.hypothesis) << ',' << r.w1 << ',' << r.w2 << ',' << r.verdict1.str() << ','
       << r.verdict2.str() << ',' << r.w2_hat << ',' << r.w1_hat << ',' << r.error << ','
       << r.wrong << ',' << r.untrusted << ',' << (r.window ? to_string(*r.window) : "") << ','
       << r.relay_decoded << ',' << r.trial_seed << ',' << r.relay_seed << ',' << r.codebook_seed1
       << ',' << r.codebook_seed2 << ',' << r.skipped << '\n';
  }
}

}  // namespace byzrelay

#endif  // BYZRELAY_EXPERIMENT_HPP
