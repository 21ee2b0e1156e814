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

#ifndef BYZRELAY_REGION_HPP
#define BYZRELAY_REGION_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "byzrelay/information.hpp"
#include "byzrelay/manipulability.hpp"

namespace byzrelay {

struct Point2 {
  double r1 = 0.0, r2 = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

/// All pmfs on `size` symbols whose entries are multiples of 1 / (steps - 1),
/// in lexicographic order of the numerators.
inline std::vector<Pmf> simplex_lattice(std::size_t size, std::size_t steps) {
  if (size == 0) throw InputError("simplex_lattice: empty alphabet");
  if (steps < 2) throw InputError("grid_steps must be at least 2");
  const std::size_t d = steps - 1;
  std::vector<Pmf> out;
  std::vector<std::size_t> parts(size, 0);
  // Enumerate compositions of d into `size` parts.
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == size) {
      parts[pos] = left;
      Pmf p(size);
      for (std::size_t k = 0; k < size; ++k)
        p[k] = static_cast<double>(parts[k]) / static_cast<double>(d);
      out.push_back(std::move(p));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      parts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  rec(rec, 0, d);
  return out;
}

/// Convex hull, counterclockwise from the lexicographically smallest vertex,
/// with collinear and duplicate points removed.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  constexpr double kSnap = 1e-12;
  for (auto& p : pts) {
    p.r1 = std::round(p.r1 / kSnap) * kSnap;
    p.r2 = std::round(p.r2 / kSnap) * kSnap;
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
  };
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= kSnap) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= kSnap) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

/// Closed-polygon containment with tolerance `tol`.
inline bool polygon_contains(const std::vector<Point2>& hull, Point2 p, double tol = 1e-9) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return std::hypot(p.r1 - hull[0].r1, p.r2 - hull[0].r2) <= tol;
  if (hull.size() == 2) {
    const auto& a = hull[0];
    const auto& b = hull[1];
    const double len = std::hypot(b.r1 - a.r1, b.r2 - a.r2);
    const double cr = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
    const double dot = (p.r1 - a.r1) * (b.r1 - a.r1) + (p.r2 - a.r2) * (b.r2 - a.r2);
    return std::abs(cr) / len <= tol && dot >= -tol * len && dot <= len * len + tol * len;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.r1 - a.r1, b.r2 - a.r2);
    const double cr = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1);
    if (cr < -tol * len) return false;
  }
  return true;
}

/// One evaluated pair of input distributions.
struct GridPoint {
  Pmf p1, p2;
  bool manipulable1 = false;  // (P_{U|X1}, I)
  bool manipulable2 = false;  // (P_{U|X2}, I)
  double trace1 = 0.0, trace2 = 0.0;
  double i1 = 0.0;  // I(X1;U|X2)
  double i2 = 0.0;  // I(X2;U|X1)
  [[nodiscard]] bool passes() const { return !manipulable1 && !manipulable2; }
};

/// Closure of the convex hull of the rate rectangles, plus the grid it was
/// built from.
struct RateRegion {
  std::vector<Point2> vertices;  // counterclockwise, starting at the origin
  std::size_t grid_steps = 0;
  bool filtered = true;
  std::size_t points_evaluated = 0;
  std::size_t points_passing = 0;
  [[nodiscard]] bool empty() const { return points_passing == 0; }
};

struct RegionSweep {
  RateRegion region;
  std::vector<GridPoint> points;
};

/// Sweep product inputs over a lattice of `grid_steps` points per probability
/// axis. With `filtered`, only points where both observation channels are
/// non-manipulable contribute rectangles [0, I(X1;U|X2)] x [0, I(X2;U|X1)].
inline RegionSweep sweep_region(const MacChannel& ch, std::size_t grid_steps, bool filtered = true) {
  const auto g1 = simplex_lattice(ch.x1().size(), grid_steps);
  const auto g2 = simplex_lattice(ch.x2().size(), grid_steps);
  const auto id = ConditionalPmf::identity(ch.u().size());

  // Side 1's observation channel depends on P_X2 only, and vice versa.
  std::vector<std::optional<UpsilonWitness>> w1(g2.size()), w2(g1.size());
  if (filtered) {
    for (std::size_t j = 0; j < g2.size(); ++j)
      w1[j] = find_witness(observation_channel(ch, g2[j], Side::One), id);
    for (std::size_t i = 0; i < g1.size(); ++i)
      w2[i] = find_witness(observation_channel(ch, g1[i], Side::Two), id);
  }

  RegionSweep out;
  out.region.grid_steps = grid_steps;
  out.region.filtered = filtered;
  std::vector<Point2> corners{{0.0, 0.0}};
  for (std::size_t i = 0; i < g1.size(); ++i)
    for (std::size_t j = 0; j < g2.size(); ++j) {
      GridPoint gp;
      gp.p1 = g1[i];
      gp.p2 = g2[j];
      gp.manipulable1 = w1[j].has_value();
      gp.manipulable2 = w2[i].has_value();
      if (w1[j]) gp.trace1 = w1[j]->trace;
      if (w2[i]) gp.trace2 = w2[i]->trace;
      const auto mi = mutual_informations(joint_from(ch, gp.p1, gp.p2));
      gp.i1 = mi.x1_u_given_x2;
      gp.i2 = mi.x2_u_given_x1;
      ++out.region.points_evaluated;
      if (gp.passes()) {
        ++out.region.points_passing;
        corners.push_back({gp.i1, 0.0});
        corners.push_back({0.0, gp.i2});
        corners.push_back({gp.i1, gp.i2});
      }
      out.points.push_back(std::move(gp));
    }
  out.region.vertices = convex_hull(std::move(corners));
  return out;
}

inline RateRegion inner_bound_region(const MacChannel& ch, std::size_t grid_steps) {
  return sweep_region(ch, grid_steps, true).region;
}

/// Same hull without the non-manipulability filter.
inline RateRegion unconstrained_region(const MacChannel& ch, std::size_t grid_steps) {
  return sweep_region(ch, grid_steps, false).region;
}

}  // namespace byzrelay

#endif  // BYZRELAY_REGION_HPP
