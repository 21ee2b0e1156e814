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

#include "byzrelay/information.hpp"
#include "byzrelay/manipulability.hpp"
#include "oracles.hpp"

namespace byzrelay {
namespace {

// Divergence-form values of the five quantities for a product joint.
MutualInformations oracle_mi(const JointPmf& j) {
  const std::size_t n1 = j.x1_size(), n2 = j.x2_size(), nu = j.u_size();
  oracle::Matrix x1u(n1, std::vector<double>(nu, 0.0)), x2u(n2, std::vector<double>(nu, 0.0)),
      x12u(n1 * n2, std::vector<double>(nu, 0.0));
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b)
      for (std::size_t u = 0; u < nu; ++u) {
        x1u[a][u] += j(a, b, u);
        x2u[b][u] += j(a, b, u);
        x12u[a * n2 + b][u] += j(a, b, u);
      }
  MutualInformations m{};
  m.x1_u = oracle::mutual_information(x1u);
  m.x2_u = oracle::mutual_information(x2u);
  m.x1x2_u = oracle::mutual_information(x12u);
  m.x1_u_given_x2 = oracle::conditional_mi(n1, nu, n2, [&](std::size_t a, std::size_t u, std::size_t b) {
    return j(a, b, u);
  });
  m.x2_u_given_x1 = oracle::conditional_mi(n2, nu, n1, [&](std::size_t b, std::size_t u, std::size_t a) {
    return j(a, b, u);
  });
  return m;
}

TEST(JointFrom, PointMassInputs) {
  const auto ch = binary_erasure_mac();
  const auto j = joint_from(ch, point_mass(2, 1), point_mass(2, 0));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t u = 0; u < 3; ++u)
        EXPECT_DOUBLE_EQ(j(a, b, u), a == 1 && b == 0 ? ch.prob(static_cast<Symbol>(u), 1, 0) : 0.0);
}

TEST(JointFrom, UniformErasureMarginals) {
  const auto j = joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2));
  EXPECT_EQ(j.marginal_u(), (std::vector<double>{0.25, 0.5, 0.25}));
  EXPECT_EQ(j.marginal_x1(), uniform_pmf(2));
  EXPECT_THROW(joint_from(binary_erasure_mac(), Pmf{0.5, 0.6}, uniform_pmf(2)), InputError);
}

TEST(JointFrom, FactorizesAndReproducesInputs) {
  Rng rng(3);
  const MacChannel ch(Alphabet(2), Alphabet(3), Alphabet(2),
                      {0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 0.6, 0.4, 0.3, 0.7, 0.05, 0.95});
  for (int rep = 0; rep < 20; ++rep) {
    const double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
    const Pmf p1{a, 1 - a}, p2{b * c, b * (1 - c), 1 - b};
    const auto j = joint_from(ch, p1, p2);
    const auto m1 = j.marginal_x1(), m2 = j.marginal_x2();
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(m1[k], p1[k], 1e-15);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(m2[k], p2[k], 1e-15);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t u = 0; u < 2; ++u)
          EXPECT_NEAR(j(x, y, u), ch.prob(static_cast<Symbol>(u), static_cast<Symbol>(x), static_cast<Symbol>(y)) * p1[x] * p2[y], 1e-15);
  }
}

TEST(MutualInformations, UniformErasureMac) {
  const auto mi = mutual_informations(joint_from(binary_erasure_mac(), uniform_pmf(2), uniform_pmf(2)));
  EXPECT_NEAR(mi.x1_u_given_x2, 1.0, 1e-10);
  EXPECT_NEAR(mi.x2_u_given_x1, 1.0, 1e-10);
  EXPECT_NEAR(mi.x1x2_u, 1.5, 1e-10);
  EXPECT_NEAR(mi.x1_u, 0.5, 1e-10);
  EXPECT_NEAR(mi.x2_u, 0.5, 1e-10);
}

TEST(MutualInformations, IndependentOutputIsZero) {
  const auto mi = mutual_informations(joint_from(uniform_noise_mac(3), Pmf{0.3, 0.7}, Pmf{0.6, 0.4}));
  EXPECT_NEAR(mi.x1_u, 0.0, 1e-12);
  EXPECT_NEAR(mi.x2_u, 0.0, 1e-12);
  EXPECT_NEAR(mi.x1_u_given_x2, 0.0, 1e-12);
  EXPECT_NEAR(mi.x2_u_given_x1, 0.0, 1e-12);
  EXPECT_NEAR(mi.x1x2_u, 0.0, 1e-12);
}

TEST(MutualInformations, MatchesDivergenceOracleAndChainRule) {
  Rng rng(2718);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> t(4 * 3);
    for (std::size_t c = 0; c < 4; ++c) {
      double s = 0.0;
      for (std::size_t u = 0; u < 3; ++u) s += t[c * 3 + u] = uniform01(rng) * (uniform01(rng) < 0.2 ? 0.0 : 1.0) + 1e-3;
      for (std::size_t u = 0; u < 3; ++u) t[c * 3 + u] /= s;
    }
    const MacChannel ch(Alphabet(2), Alphabet(2), Alphabet(3), t);
    const double a = uniform01(rng), b = uniform01(rng);
    const auto j = joint_from(ch, Pmf{a, 1 - a}, Pmf{b, 1 - b});
    const auto mi = mutual_informations(j);
    const auto o = oracle_mi(j);
    EXPECT_NEAR(mi.x1_u, o.x1_u, 1e-10);
    EXPECT_NEAR(mi.x2_u, o.x2_u, 1e-10);
    EXPECT_NEAR(mi.x1_u_given_x2, o.x1_u_given_x2, 1e-10);
    EXPECT_NEAR(mi.x2_u_given_x1, o.x2_u_given_x1, 1e-10);
    EXPECT_NEAR(mi.x1x2_u, o.x1x2_u, 1e-10);
    EXPECT_NEAR(mi.x1_u_given_x2 + mi.x2_u, mi.x1x2_u, 1e-10);
    EXPECT_NEAR(mi.x2_u_given_x1 + mi.x1_u, mi.x1x2_u, 1e-10);
    for (double v : {mi.x1_u, mi.x2_u, mi.x1_u_given_x2, mi.x2_u_given_x1, mi.x1x2_u}) EXPECT_GE(v, 0.0);
  }
}

TEST(MutualInformations, WindowIsStrictWhereTheConditionHolds) {
  const auto ch = binary_erasure_mac();
  for (int i = 1; i < 10; ++i)
    for (int k = 1; k < 10; ++k) {
      const Pmf p1 = bernoulli(i / 10.0), p2 = bernoulli(k / 10.0);
      ASSERT_TRUE(theorem_condition_holds(ch, p1, p2));
      const auto mi = mutual_informations(joint_from(ch, p1, p2));
      EXPECT_LT(mi.x1_u + 1e-9, mi.x1_u_given_x2);
      EXPECT_LT(mi.x2_u + 1e-9, mi.x2_u_given_x1);
    }
}

TEST(JointPmf, DecoderReferenceAndConditional) {
  const auto j = joint_from(binary_erasure_mac(), uniform_pmf(2), Pmf{0.75, 0.25});
  const auto r2 = j.decoder_reference(Side::Two);
  // Layout (u, own = x2, other = x1).
  EXPECT_DOUBLE_EQ(r2[(1 * 2 + 1) * 2 + 0], j(0, 1, 1));
  const auto c = j.x1_given_u();
  EXPECT_DOUBLE_EQ(c(0, 0), 1.0);  // U = 0 forces X1 = 0
  EXPECT_DOUBLE_EQ(c(1, 2), 1.0);
  EXPECT_NEAR(c(1, 1), 0.5 * 0.75 / (0.5 * 0.75 + 0.5 * 0.25), 1e-15);  // x1 = 1, x2 = 0
}

}  // namespace
}  // namespace byzrelay
