// Copyright 2026 The byzrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "byzrelay/coding.hpp"
#include "oracles.hpp"

namespace byzrelay {
namespace {

std::vector<int> to_ints(SequenceView s) { return {s.begin(), s.end()}; }

std::map<std::tuple<int, int, int>, double> reference_map(const std::vector<double>& r, std::size_t nu,
                                                          std::size_t na, std::size_t nb) {
  std::map<std::tuple<int, int, int>, double> m;
  for (std::size_t u = 0; u < nu; ++u)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        m[{static_cast<int>(u), static_cast<int>(a), static_cast<int>(b)}] = r[(u * na + a) * nb + b];
  return m;
}

Codebook from_rows(const std::vector<Sequence>& rows, std::size_t n) {
  Sequence data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  unsigned bits = 0;
  while ((std::size_t{1} << bits) < rows.size()) ++bits;
  return Codebook(Alphabet(2), uniform_pmf(2), n, bits, 1.0, 0, std::move(data));
}

// ---------------------------------------------------------------------------

TEST(Codebook, SizesAndMembership) {
  Rng rng(1);
  const auto one = build_codebook(Alphabet(2), uniform_pmf(2), 9, 0.0, 0.3, rng);
  EXPECT_EQ(one.size(), 1u);

  const double d = std::pow(16.0, -1.0 / 3.0);
  const auto cb = build_codebook(Alphabet(2), uniform_pmf(2), 16, 0.5, d, rng);
  ASSERT_EQ(cb.size(), 256u);
  for (std::uint64_t i = 1; i <= cb.size(); ++i) {
    const auto w = cb.codeword(i);
    const auto ones = std::count(w.begin(), w.end(), 1);
    EXPECT_GE(ones, 2);
    EXPECT_LE(ones, 14);
    EXPECT_TRUE(is_typical(w, uniform_pmf(2), d));
  }
  EXPECT_THROW((void)cb.codeword(0), InputError);
  EXPECT_THROW((void)cb.codeword(257), InputError);
}

TEST(Codebook, SeedDeterminism) {
  const auto a = build_codebook_seeded(Alphabet(2), Pmf{0.7, 0.3}, 20, 6, 0.2, 5);
  const auto b = build_codebook_seeded(Alphabet(2), Pmf{0.7, 0.3}, 20, 6, 0.2, 5);
  const auto c = build_codebook_seeded(Alphabet(2), Pmf{0.7, 0.3}, 20, 6, 0.2, 6);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
}

TEST(Codebook, ResourceCap) {
  Rng rng(1);
  EXPECT_THROW(build_codebook(Alphabet(2), uniform_pmf(2), 40, 0.6, 0.3, rng), ResourceError);
  EXPECT_THROW(build_codebook_bits(Alphabet(2), uniform_pmf(2), 8, 5, 0.3, rng, 16), ResourceError);
  EXPECT_EQ(rate_bits(16, 0.5), 8u);
  EXPECT_EQ(rate_bits(10, 0.3), 3u);
  EXPECT_EQ(rate_bits(10, 0.31), 4u);
}

TEST(Codebook, ExportRoundTrip) {
  const auto cb = build_codebook_seeded(Alphabet{"lo", "hi"}, Pmf{0.6, 0.4}, 12, 4, 0.25, 77);
  std::stringstream ss;
  write_codebook(ss, cb);
  const auto back = read_codebook(ss);
  EXPECT_TRUE(back == cb);
  EXPECT_EQ(back.seed(), 77u);
  EXPECT_DOUBLE_EQ(back.tolerance(), 0.25);

  std::string text = [&] {
    std::stringstream s2;
    write_codebook(s2, cb);
    return s2.str();
  }();
  // Replace the first codeword by an all-ones word, which is not typical.
  const auto pos = text.find("codewords 16\n") + 13;
  const auto end = text.find('\n', pos);
  text.replace(pos, end - pos, "1 1 1 1 1 1 1 1 1 1 1 1");
  std::istringstream bad(text);
  EXPECT_THROW(read_codebook(bad), InputError);
}

// ---------------------------------------------------------------------------

TEST(RatePlan, UniformErasureTargetsRaisedIntoWindow) {
  const auto ch = binary_erasure_mac();
  const auto plan = plan_rates(ch, uniform_pmf(2), uniform_pmf(2), 0.3, 0.3);
  EXPECT_GT(plan.r1_op, 0.5);
  EXPECT_LT(plan.r1_op, 1.0);
  EXPECT_GT(plan.r2_op, 0.5);
  EXPECT_LT(plan.r2_op, 1.0);
  EXPECT_GT(plan.r1_op + plan.r2_op, 1.5);
  EXPECT_GE(plan.r1_op, 0.75);  // at least the interval midpoint
  EXPECT_LE(plan.r1_op + plan.r2_op, 1.5 + 0.01);  // raised minimally
  EXPECT_TRUE(plan.window_violation().empty());
}

TEST(RatePlan, AdmissibleTargetsKept) {
  const auto plan = plan_rates(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2), 0.8, 0.8);
  EXPECT_DOUBLE_EQ(plan.r1_op, 0.8);
  EXPECT_DOUBLE_EQ(plan.r2_op, 0.8);
}

TEST(RatePlan, Errors) {
  const auto ch = binary_erasure_mac();
  EXPECT_THROW(plan_rates(ch, uniform_pmf(2), uniform_pmf(2), 1.2, 0.3), RateError);
  EXPECT_THROW(plan_rates(ch, uniform_pmf(2), uniform_pmf(2), 0.3, -0.1), RateError);
  EXPECT_THROW(plan_rates(uniform_noise_mac(2), uniform_pmf(2), uniform_pmf(2), 0.1, 0.1), InfeasibleError);
}

TEST(RatePlan, InvariantsOverAGrid) {
  const auto ch = binary_erasure_mac();
  for (int i = 1; i < 10; i += 2)
    for (int k = 1; k < 10; k += 2) {
      const Pmf p1 = bernoulli(i / 10.0), p2 = bernoulli(k / 10.0);
      const auto mi = mutual_informations(joint_from(ch, p1, p2));
      for (double f : {0.0, 0.2, 0.6, 0.95}) {
        const double r1 = f * mi.x1_u_given_x2, r2 = f * mi.x2_u_given_x1;
        const auto plan = plan_rates(ch, p1, p2, r1, r2);
        EXPECT_LT(mi.x1_u, plan.r1_op);
        EXPECT_LT(plan.r1_op, mi.x1_u_given_x2);
        EXPECT_LT(mi.x2_u, plan.r2_op);
        EXPECT_LT(plan.r2_op, mi.x2_u_given_x1);
        EXPECT_GT(plan.r1_op + plan.r2_op, mi.x1x2_u);
        EXPECT_GE(plan.r1_op, r1);
        EXPECT_GE(plan.r2_op, r2);
      }
    }
}

TEST(RatePlan, IndexMap) {
  RatePlan plan;
  plan.r1 = 1.0 / 16;
  plan.r1_op = 5.0 / 16;
  const auto m = plan.index_map(Side::One, 16);
  EXPECT_EQ(m.message_bits, 1u);
  EXPECT_EQ(m.split_bits, 4u);
  EXPECT_EQ(m.split(), 16u);
}

// ---------------------------------------------------------------------------

TEST(Encode, DegenerateSplitIsDeterministic) {
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 8, 3, 0.4, 1);
  const IndexMap map{3, 0};
  Rng rng(2);
  for (std::uint64_t w = 1; w <= 8; ++w) {
    const auto e = encode(cb, map, w, rng);
    EXPECT_EQ(e.sub_index, 1u);
    EXPECT_EQ(e.index, w);
    EXPECT_EQ(e.codeword, Sequence(cb.codeword(w).begin(), cb.codeword(w).end()));
    EXPECT_EQ(recover_message(e.index, map), w);
  }
  EXPECT_THROW(encode(cb, map, 0, rng), InputError);
  EXPECT_THROW(encode(cb, map, 9, rng), InputError);
  EXPECT_THROW(encode(cb, IndexMap{2, 0}, 1, rng), InputError);
}

TEST(Encode, SplitIndexRangeAndUniformity) {
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 16, 5, 0.4, 1);
  const IndexMap map{1, 4};
  Rng rng(2026);
  for (int k = 0; k < 200; ++k) {
    const auto e = encode(cb, map, 2, rng);
    EXPECT_GE(e.index, 17u);
    EXPECT_LE(e.index, 32u);
  }
  std::vector<int> hist(16, 0);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) ++hist[encode(cb, map, 1, rng).sub_index - 1];
  const double p = 1.0 / 16, mean = draws * p, sd = std::sqrt(draws * p * (1 - p));
  for (int c : hist) EXPECT_LE(std::abs(c - mean), 3 * sd);
}

TEST(RecoverMessage, ArithmeticAndRoundTrip) {
  EXPECT_EQ(recover_message(17, IndexMap{1, 4}), 2u);
  EXPECT_EQ(recover_message(5, IndexMap{3, 0}), 5u);
  EXPECT_THROW(recover_message(0, IndexMap{1, 4}), InputError);
  EXPECT_THROW(recover_message(33, IndexMap{1, 4}), InputError);
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 16, 8, 0.4, 3);
  for (unsigned split = 0; split <= 8; ++split) {
    const IndexMap map{8 - split, split};
    for (std::uint64_t s = 0; s < 3; ++s) {
      Rng rng(s);
      for (std::uint64_t w = 1; w <= map.messages(); ++w)
        ASSERT_EQ(recover_message(encode(cb, map, w, rng).index, map), w);
    }
  }
}

// ---------------------------------------------------------------------------

TEST(Decode, SingleCandidateHonest) {
  const auto ch = binary_erasure_mac();
  const auto joint = joint_from(ch, uniform_pmf(2), uniform_pmf(2));
  const auto s = default_schedule(3, 2, 2);
  const std::size_t n = 16;
  const auto own = build_codebook_seeded(Alphabet(2), uniform_pmf(2), n, 0, s.delta(n), 1);
  const auto oth = build_codebook_seeded(Alphabet(2), uniform_pmf(2), n, 0, s.delta(n), 2);
  Rng rng(3);
  const auto u = transmit_mac(ch, own.codeword(1), oth.codeword(1), rng);
  EXPECT_EQ(decode(u, 1, own, oth, joint, Side::One, s), Verdict::decoded(1));
  EXPECT_EQ(decode(u, 1, oth, own, joint, Side::Two, s).str(), "1");
}

TEST(Decode, FarSequenceIsUntrusted) {
  const auto joint = joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2));
  const std::size_t n = 8;
  const TypicalityDecoder dec(joint.decoder_reference(Side::One), 3, 2, 2, n, 0.1, 0.2);
  const auto cb = from_rows({{0, 1, 0, 1, 0, 1, 0, 1}, {1, 1, 0, 0, 1, 1, 0, 0}}, n);
  const Sequence v(n, 2), own{0, 1, 1, 0, 0, 1, 1, 0};
  EXPECT_EQ(dec.decode(v, own, cb).str(), "!");
}

TEST(Decode, CollidingCodewordsAreUntrusted) {
  const auto joint = joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2));
  const std::size_t n = 8;
  const Sequence own{0, 0, 1, 1, 0, 0, 1, 1};
  const Sequence x2{0, 1, 0, 1, 0, 1, 0, 1};
  const Sequence y2{0, 1, 0, 1, 1, 0, 1, 0};  // differs in four places
  Sequence v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Symbol>(own[i] + x2[i]);
  const auto cb = from_rows({x2, y2}, n);
  const auto ref = joint.decoder_reference(Side::One);
  const auto rmap = reference_map(ref, 3, 2, 2);
  // Loose uniqueness tolerance: both candidates typical -> "!".
  const TypicalityDecoder loose(ref, 3, 2, 2, n, 0.0, 0.25);
  EXPECT_EQ(loose.decode(v, own, cb).str(), "!");
  EXPECT_EQ(oracle::brute_decode(to_ints(v), to_ints(own), {to_ints(x2), to_ints(y2)}, rmap, 0.0, 0.25), 0u);
  // Tight uniqueness: only the true codeword survives.
  const TypicalityDecoder tight(ref, 3, 2, 2, n, 0.0, 0.1);
  EXPECT_EQ(tight.decode(v, own, cb).str(), "1");
  EXPECT_EQ(oracle::brute_decode(to_ints(v), to_ints(own), {to_ints(x2), to_ints(y2)}, rmap, 0.0, 0.1), 1u);
  // Duplicated codeword: never unique.
  EXPECT_EQ(tight.decode(v, own, from_rows({x2, x2}, n)).str(), "!");
}

TEST(Decode, RejectsBadTolerancesAndShapes) {
  const auto joint = joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2));
  EXPECT_THROW(TypicalityDecoder(joint.decoder_reference(Side::One), 3, 2, 2, 8, 0.3, 0.2), InputError);
  const TypicalityDecoder dec(joint.decoder_reference(Side::One), 3, 2, 2, 8, 0.1, 0.2);
  const auto cb = from_rows({Sequence(8, 0)}, 8);
  EXPECT_THROW(dec.decode(Sequence(7, 0), Sequence(8, 0), cb), InputError);
  EXPECT_THROW(dec.decode(Sequence(8, 3), Sequence(8, 0), cb), InputError);
}

TEST(Decode, WorkBudgetIsEnforced) {
  const auto joint = joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2));
  // Nothing is typical, so the scan cannot stop early.
  const TypicalityDecoder dec(joint.decoder_reference(Side::One), 3, 2, 2, 8, 0.0, 0.0);
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 8, 4, 0.5, 9);
  WorkBudget budget{0, 3};
  EXPECT_THROW(dec.decode(Sequence(8, 1), Sequence(8, 0), cb, &budget), ResourceError);
}

// Randomized equivalence with the literal decoder definition.
TEST(Decode, MatchesBruteForceOracle) {
  const auto ch = binary_erasure_mac();
  int decoded = 0, untrusted = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(derive_seed(515, {seed}));
    const std::size_t n = 4 + uniform_below(rng, 7);
    const double p1 = 0.2 + 0.6 * uniform01(rng), p2 = 0.2 + 0.6 * uniform01(rng);
    const auto joint = joint_from(ch, bernoulli(p1), bernoulli(p2));
    const Side side = seed % 2 ? Side::One : Side::Two;
    const auto ref = joint.decoder_reference(side);
    const double acc = 0.5 * uniform01(rng), uni = acc + 0.3 * uniform01(rng);
    const unsigned bits = static_cast<unsigned>(uniform_below(rng, 5));
    Sequence data;
    for (std::uint64_t k = 0; k < (1u << bits) * n; ++k) data.push_back(uniform01(rng) < p2 ? 1 : 0);
    const Codebook other(Alphabet(2), uniform_pmf(2), n, bits, 1.0, 0, data);
    Sequence own(n);
    for (auto& s : own) s = uniform01(rng) < p1 ? 1 : 0;
    Sequence v(n);
    if (uniform01(rng) < 0.7) {
      const auto pick = 1 + uniform_below(rng, other.size());
      for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Symbol>(own[i] + other.codeword(pick)[i]);
      if (uniform01(rng) < 0.3) v[uniform_below(rng, n)] = static_cast<Symbol>(uniform_below(rng, 3));
    } else {
      for (auto& s : v) s = static_cast<Symbol>(uniform_below(rng, 3));
    }
    const TypicalityDecoder dec(ref, 3, 2, 2, n, acc, uni);
    const auto got = dec.decode(v, own, other);

    std::vector<std::vector<int>> others;
    for (std::uint64_t k = 1; k <= other.size(); ++k) others.push_back(to_ints(other.codeword(k)));
    const auto want = oracle::brute_decode(to_ints(v), to_ints(own), others, reference_map(ref, 3, 2, 2), acc, uni);
    ASSERT_EQ(got.is_decoded() ? got.index() : 0u, want) << "seed " << seed;
    (got.is_decoded() ? decoded : untrusted) += 1;
  }
  EXPECT_GT(decoded, 10);
  EXPECT_GT(untrusted, 10);
}

TEST(Decode, ScanOrderDoesNotMatter) {
  const auto ch = binary_erasure_mac();
  const auto joint = joint_from(ch, bernoulli(0.4), bernoulli(0.4));
  const std::size_t n = 12;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto cb1 = build_codebook_seeded(Alphabet(2), bernoulli(0.4), n, 2, 0.3, seed);
    const auto cb2 = build_codebook_seeded(Alphabet(2), bernoulli(0.4), n, 4, 0.3, seed + 1000);
    const auto u = transmit_mac(ch, cb1.codeword(1), cb2.codeword(1 + uniform_below(rng, 16)), rng);
    std::vector<std::uint64_t> perm(16);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    Sequence data;
    for (auto k : perm) data.insert(data.end(), cb2.codeword(k).begin(), cb2.codeword(k).end());
    const Codebook shuffled(Alphabet(2), bernoulli(0.4), n, 4, 0.3, 0, data);
    const TypicalityDecoder dec(joint.decoder_reference(Side::One), 3, 2, 2, n, 0.2, 0.35);
    const auto a = dec.decode(u, cb1.codeword(1), cb2);
    const auto b = dec.decode(u, cb1.codeword(1), shuffled);
    ASSERT_EQ(a.is_decoded(), b.is_decoded());
    if (a.is_decoded()) { EXPECT_EQ(perm[b.index() - 1], a.index()); }
  }
}

}  // namespace
}  // namespace byzrelay
