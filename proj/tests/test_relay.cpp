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
#include <cmath>

#include "byzrelay/relay.hpp"

namespace byzrelay {
namespace {

struct Fixture {
  MacChannel ch = binary_erasure_mac();
  std::size_t n = 24;
  Codebook cb1 = build_codebook_seeded(Alphabet(2), uniform_pmf(2), n, 3, 0.2, 11);
  Codebook cb2 = build_codebook_seeded(Alphabet(2), uniform_pmf(2), n, 3, 0.2, 12);
  DecodeAndReforge d = [this] {
    DecodeAndReforge r;
    r.channel = ch;
    r.reference = joint_from(ch, uniform_pmf(2), uniform_pmf(2)).decoder_reference(Side::One);
    r.accept_tol = 0.1;
    r.unique_tol = 0.1;
    r.map1 = IndexMap{2, 1};
    r.map2 = IndexMap{3, 0};
    return r;
  }();
};

TEST(ShiftedIndex, Arithmetic) {
  Rng rng(1);
  // offset 0 keeps the decoded codeword.
  EXPECT_EQ(detail::shifted_index(5, IndexMap{2, 1}, 0, rng), 6u);
  // index0 = 5 -> codebook index 6 -> message 3 of 4; +1 -> message 4 -> {7, 8}.
  for (int k = 0; k < 20; ++k) {
    const auto i = detail::shifted_index(5, IndexMap{2, 1}, 1, rng);
    EXPECT_TRUE(i == 7 || i == 8) << i;
  }
  // Wraps around the message count.
  EXPECT_EQ(detail::shifted_index(7, IndexMap{3, 0}, 1, rng), 1u);
  EXPECT_EQ(detail::shifted_index(2, IndexMap{3, 0}, 3, rng), 6u);
}

TEST(DecodeAndReforge, ReplacesDecodedPairWithShiftedMessages) {
  Fixture f;
  int hits = 0;
  for (std::uint64_t i = 1; i <= f.cb1.size(); ++i)
    for (std::uint64_t j = 1; j <= f.cb2.size(); ++j) {
      Rng rng(i * 100 + j);
      const auto u = transmit_mac(f.ch, f.cb1.codeword(i), f.cb2.codeword(j), rng);
      RelayTrace t;
      const auto v = relay_forward(f.d, u, f.cb1, f.cb2, rng, 3, &t);
      EXPECT_GT(t.evaluations, 0u);
      if (!t.pair_decoded) {
        EXPECT_EQ(v, u);
        continue;
      }
      ++hits;
      EXPECT_EQ(t.index1, i);
      EXPECT_EQ(t.index2, j);
      // v must be the MAC image of shifted codewords: message of node 2 moves by one.
      const std::uint64_t w2 = recover_message(j, f.d.map2);
      const std::uint64_t j_new = w2 % 8 + 1;
      const auto x2 = f.cb2.codeword(j_new);
      bool found = false;
      for (std::uint64_t i_new = 1; i_new <= f.cb1.size() && !found; ++i_new) {
        if (recover_message(i_new, f.d.map1) != recover_message(i, f.d.map1) % 4 + 1) continue;
        Sequence expect(f.n);
        for (std::size_t k = 0; k < f.n; ++k)
          expect[k] = static_cast<Symbol>(f.cb1.codeword(i_new)[k] + x2[k]);
        found = expect == v;
      }
      EXPECT_TRUE(found) << i << ' ' << j;
    }
  EXPECT_GT(hits, 16);
}

TEST(DecodeAndReforge, AmbiguousObservationIsForwarded) {
  Fixture f;
  f.d.accept_tol = 1.0;
  f.d.unique_tol = 1.0;  // every pair typical
  Rng rng(5);
  const auto u = transmit_mac(f.ch, f.cb1.codeword(1), f.cb2.codeword(1), rng);
  RelayTrace t;
  EXPECT_EQ(relay_forward(f.d, u, f.cb1, f.cb2, rng, 3, &t), u);
  EXPECT_FALSE(t.pair_decoded);
}

TEST(DecodeAndReforge, OutputDependsOnlyOnObservationAndRandomness) {
  Fixture f;
  Rng src(9);
  const auto u = transmit_mac(f.ch, f.cb1.codeword(2), f.cb2.codeword(3), src);
  Rng a(77), b(77);
  EXPECT_EQ(relay_forward(f.d, u, f.cb1, f.cb2, a, 3), relay_forward(f.d, u, f.cb1, f.cb2, b, 3));
}

TEST(DecodeAndReforge, EvaluationCapIsAResourceError) {
  Fixture f;
  f.d.max_evaluations = 4;
  Rng rng(1);
  const auto u = transmit_mac(f.ch, f.cb1.codeword(1), f.cb2.codeword(1), rng);
  EXPECT_THROW(relay_forward(f.d, u, f.cb1, f.cb2, rng, 3), ResourceError);
}

TEST(DecodeAndReforge, FactoryUsesScheduleTolerances) {
  const auto s = default_schedule(3, 2, 2);
  const auto d = make_decode_and_reforge(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2), s, 64,
                                         IndexMap{1, 1}, IndexMap{2, 0});
  EXPECT_DOUBLE_EQ(d.accept_tol, s.accept_tolerance(64));
  EXPECT_DOUBLE_EQ(d.unique_tol, s.unique_tolerance(64));
  EXPECT_EQ(describe(d), "reforge(1,1)");
}

TEST(MemorylessSubstitution, KernelShapeChecked) {
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 4, 0, 1.0, 1);
  Rng rng(1);
  EXPECT_THROW(relay_forward(MemorylessSubstitution{ConditionalPmf::identity(2)}, Sequence{0, 1, 2, 0}, cb, cb, rng, 3),
               InputError);
}

TEST(MemorylessSubstitution, SwapKernelFrequencies) {
  const auto cb = build_codebook_seeded(Alphabet(2), uniform_pmf(2), 4, 0, 1.0, 1);
  const auto t = ConditionalPmf::from_rows({{0.75, 0.0}, {0.25, 1.0}});  // 0 -> 1 w.p. 1/4
  Rng rng(8);
  const std::size_t n = 40000;
  const auto v = relay_forward(MemorylessSubstitution{t}, Sequence(n, 0), cb, cb, rng, 2);
  const double f = static_cast<double>(std::count(v.begin(), v.end(), 1)) / n;
  EXPECT_NEAR(f, 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
}

}  // namespace
}  // namespace byzrelay
