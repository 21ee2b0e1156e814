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

#include <cmath>
#include <numeric>

#include "byzrelay/region.hpp"

namespace byzrelay {
namespace {

void expect_square(const RateRegion& r) {
  const std::vector<Point2> want{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  ASSERT_EQ(r.vertices.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(r.vertices[i].r1, want[i].r1, 1e-9);
    EXPECT_NEAR(r.vertices[i].r2, want[i].r2, 1e-9);
  }
}

TEST(SimplexLattice, CountsAndSums) {
  EXPECT_EQ(simplex_lattice(2, 33).size(), 33u);
  EXPECT_EQ(simplex_lattice(3, 5).size(), 15u);
  EXPECT_EQ(simplex_lattice(1, 7).size(), 1u);
  for (const auto& p : simplex_lattice(4, 6))
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(simplex_lattice(2, 1), InputError);
  EXPECT_THROW(simplex_lattice(0, 5), InputError);
}

TEST(Region, ErasureMacIsUnitSquare) {
  const auto sweep = sweep_region(binary_erasure_mac(), 33);
  expect_square(sweep.region);
  EXPECT_EQ(sweep.region.points_evaluated, 33u * 33u);
  // Deterministic inputs leave an unused output symbol, which is manipulable.
  for (const auto& gp : sweep.points) {
    const bool interior1 = gp.p1[0] > 0 && gp.p1[0] < 1, interior2 = gp.p2[0] > 0 && gp.p2[0] < 1;
    EXPECT_EQ(gp.passes(), interior1 && interior2);
  }
  EXPECT_EQ(sweep.region.points_passing, 31u * 31u);
  expect_square(unconstrained_region(binary_erasure_mac(), 33));
}

TEST(Region, CoarseGridIsContainedInFineGrid) {
  const MacChannel ch(Alphabet(2), Alphabet(2), Alphabet(3),
                      {0.8, 0.2, 0.0, 0.1, 0.6, 0.3, 0.2, 0.5, 0.3, 0.0, 0.3, 0.7});
  const auto coarse = inner_bound_region(ch, 9);
  const auto fine = inner_bound_region(ch, 33);
  ASSERT_FALSE(fine.empty());
  for (const auto& v : coarse.vertices) EXPECT_TRUE(polygon_contains(fine.vertices, v, 1e-9));
  const auto free = unconstrained_region(ch, 33);
  for (const auto& v : fine.vertices) EXPECT_TRUE(polygon_contains(free.vertices, v, 1e-9));
}

TEST(Region, SingleSymbolInputCollapses) {
  // X1 takes one value and U = X2; node 1 is always manipulable.
  const MacChannel ch(Alphabet(1), Alphabet(2), Alphabet(2), {1.0, 0.0, 0.0, 1.0});
  const auto r = inner_bound_region(ch, 9);
  EXPECT_TRUE(r.empty());
  ASSERT_EQ(r.vertices.size(), 1u);
  EXPECT_EQ(r.vertices[0], (Point2{0, 0}));
  const auto u = unconstrained_region(ch, 9);
  ASSERT_EQ(u.vertices.size(), 2u);
  EXPECT_NEAR(u.vertices[1].r1, 0.0, 1e-12);
  EXPECT_NEAR(u.vertices[1].r2, 1.0, 1e-9);
}

TEST(Region, RandomChannelsStayInsideEntropyBox) {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t nx1 = 2 + uniform_below(rng, 2), nx2 = 2, nu = 2 + uniform_below(rng, 3);
    std::vector<double> t(nx1 * nx2 * nu);
    for (std::size_t c = 0; c < nx1 * nx2; ++c) {
      double s = 0;
      for (std::size_t u = 0; u < nu; ++u) s += t[c * nu + u] = uniform01(rng);
      for (std::size_t u = 0; u < nu; ++u) t[c * nu + u] /= s;
    }
    const MacChannel ch(Alphabet(nx1), Alphabet(nx2), Alphabet(nu), t);
    const auto r = unconstrained_region(ch, 7);
    for (const auto& v : r.vertices) {
      EXPECT_GE(v.r1, -1e-12);
      EXPECT_GE(v.r2, -1e-12);
      EXPECT_LE(v.r1, std::log2(static_cast<double>(nx1)) + 1e-9);
      EXPECT_LE(v.r2, std::log2(static_cast<double>(nx2)) + 1e-9);
    }
  }
}

TEST(ConvexHull, RandomPointSets) {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Point2> pts(3 + uniform_below(rng, 30));
    for (auto& p : pts) p = {uniform01(rng), uniform01(rng)};
    const auto h = convex_hull(pts);
    ASSERT_GE(h.size(), 3u);
    for (const auto& p : pts) EXPECT_TRUE(polygon_contains(h, p, 1e-9));
    for (const auto& p : pts) EXPECT_LE(h[0].r1, p.r1 + 1e-12);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto& a = h[i];
      const auto& b = h[(i + 1) % h.size()];
      const auto& c = h[(i + 2) % h.size()];
      EXPECT_GT((b.r1 - a.r1) * (c.r2 - a.r2) - (b.r2 - a.r2) * (c.r1 - a.r1), 0.0);
    }
  }
  EXPECT_EQ(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size(), 2u);
}

}  // namespace
}  // namespace byzrelay
