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

#ifndef BYZRELAY_RATE_PLAN_HPP
#define BYZRELAY_RATE_PLAN_HPP

#include <sstream>
#include <string>

#include "byzrelay/codebook.hpp"
#include "byzrelay/information.hpp"
#include "byzrelay/manipulability.hpp"

namespace byzrelay {

/// How a message index is embedded into a codebook index at block length n:
/// 2^message_bits messages, 2^split_bits private sub-indices per message.
struct IndexMap {
  unsigned message_bits = 0;
  unsigned split_bits = 0;

  [[nodiscard]] unsigned codebook_bits() const { return message_bits + split_bits; }
  [[nodiscard]] std::uint64_t messages() const { return std::uint64_t{1} << message_bits; }
  [[nodiscard]] std::uint64_t split() const { return std::uint64_t{1} << split_bits; }
};

/// Target rates (R1, R2), operating rates (R1', R2') and the channel
/// quantities they were planned against.
struct RatePlan {
  double r1 = 0.0, r2 = 0.0;
  double r1_op = 0.0, r2_op = 0.0;
  MutualInformations mi{};

  [[nodiscard]] double target(Side s) const { return s == Side::One ? r1 : r2; }
  [[nodiscard]] double operating(Side s) const { return s == Side::One ? r1_op : r2_op; }

  /// Integer index map for node `s` at block length n.
  [[nodiscard]] IndexMap index_map(Side s, std::size_t n) const {
    const unsigned mb = rate_bits(n, target(s));
    const unsigned cb = rate_bits(n, operating(s));
    return IndexMap{mb, cb >= mb ? cb - mb : 0};
  }

  /// Empty when every window inequality holds, else a description of the
  /// first violated one.
  [[nodiscard]] std::string window_violation() const {
    std::ostringstream os;
    if (!(mi.x1_u < r1_op && r1_op < mi.x1_u_given_x2))
      os << "R1' = " << r1_op << " outside (" << mi.x1_u << ", " << mi.x1_u_given_x2 << ")";
    else if (!(mi.x2_u < r2_op && r2_op < mi.x2_u_given_x1))
      os << "R2' = " << r2_op << " outside (" << mi.x2_u << ", " << mi.x2_u_given_x1 << ")";
    else if (!(r1_op + r2_op > mi.x1x2_u))
      os << "R1' + R2' = " << r1_op + r2_op << " not above " << mi.x1x2_u;
    else if (r1_op < r1 || r2_op < r2)
      os << "operating rates below targets";
    return os.str();
  }
};

inline constexpr double kSumMargin = 1e-3;

/// Operating rates inside the integrity window
///   I(X1;U) < R1' < I(X1;U|X2),  I(X2;U) < R2' < I(X2;U|X1),
///   R1' + R2' > I(X1,X2;U),      R' >= R.
///
/// Targets that already satisfy the window are kept. Otherwise each rate
/// outside its own interval moves to the interval midpoint; if the sum is
/// still too small both rates are raised in proportion to their remaining
/// headroom until the sum clears I(X1,X2;U) by min(1e-3, a tenth of the
/// spare room).
inline RatePlan plan_rates(const MacChannel& ch, const Pmf& p1, const Pmf& p2, double r1,
                           double r2) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw RateError("plan_rates: target rates must be >= 0");
  const auto report = condition_report(ch, p1, p2);
  if (!report.holds())
    throw InfeasibleError(std::string("plan_rates: observation channel of node ") +
                          (report.side1 ? "1" : "2") + " is manipulable");

  RatePlan plan;
  plan.r1 = r1;
  plan.r2 = r2;
  plan.mi = mutual_informations(joint_from(ch, p1, p2));
  const auto& mi = plan.mi;
  if (r1 >= mi.x1_u_given_x2)
    throw RateError("plan_rates: R1 = " + std::to_string(r1) + " is not below I(X1;U|X2) = " +
                    std::to_string(mi.x1_u_given_x2));
  if (r2 >= mi.x2_u_given_x1)
    throw RateError("plan_rates: R2 = " + std::to_string(r2) + " is not below I(X2;U|X1) = " +
                    std::to_string(mi.x2_u_given_x1));

  const double lo1 = mi.x1_u, hi1 = mi.x1_u_given_x2;
  const double lo2 = mi.x2_u, hi2 = mi.x2_u_given_x1;
  if (!(lo1 < hi1) || !(lo2 < hi2) || !(hi1 + hi2 > mi.x1x2_u))
    throw InfeasibleError("plan_rates: the operating-rate window is empty");

  plan.r1_op = (lo1 < r1 && r1 < hi1) ? r1 : std::max(r1, 0.5 * (lo1 + hi1));
  plan.r2_op = (lo2 < r2 && r2 < hi2) ? r2 : std::max(r2, 0.5 * (lo2 + hi2));

  if (!(plan.r1_op + plan.r2_op > mi.x1x2_u)) {
    const double h1 = hi1 - plan.r1_op, h2 = hi2 - plan.r2_op;
    const double deficit = mi.x1x2_u - (plan.r1_op + plan.r2_op);
    const double room = h1 + h2;
    if (!(room > deficit)) throw InfeasibleError("plan_rates: no room to satisfy the sum bound");
    const double raise = deficit + std::min(kSumMargin, 0.1 * (room - deficit));
    plan.r1_op += h1 / room * raise;
    plan.r2_op += h2 / room * raise;
  }

  const auto v = plan.window_violation();
  if (!v.empty()) throw InfeasibleError("plan_rates: " + v);
  return plan;
}

/// Plan without the integrity window: operating rates equal the targets. Used
/// for rate points that deliberately sit outside the window.
inline RatePlan direct_rates(const MacChannel& ch, const Pmf& p1, const Pmf& p2, double r1,
                             double r2) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw RateError("direct_rates: rates must be >= 0");
  RatePlan plan;
  plan.r1 = plan.r1_op = r1;
  plan.r2 = plan.r2_op = r2;
  plan.mi = mutual_informations(joint_from(ch, p1, p2));
  return plan;
}

}  // namespace byzrelay

#endif  // BYZRELAY_RATE_PLAN_HPP
