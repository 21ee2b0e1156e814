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

#ifndef BYZRELAY_CHANNEL_IO_HPP
#define BYZRELAY_CHANNEL_IO_HPP

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "byzrelay/channel.hpp"

namespace byzrelay {

// Channel spec, version 1. Blank lines and lines starting with '#' are
// ignored.
//
//   byzrelay-channel 1
//   x1 <label> ...
//   x2 <label> ...
//   u <label> ...
//   law
//   <p(u_1|x1,x2)> ... <p(u_|U||x1,x2)>      one row per (x1, x2), x2 fastest
//
// Rows must sum to 1 within 1e-9; they are renormalized after the check.
inline constexpr int kChannelFormatVersion = 1;
inline constexpr double kChannelRowTol = 1e-9;

inline MacChannel read_channel(std::istream& is, const std::string& source = "channel") {
  std::size_t line_no = 0;
  std::string line;
  auto fail = [&](const std::string& msg) {
    return InputError(source + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto keyed = [&](const std::string& key) {
    if (!next_line()) throw fail("unexpected end of file, expected '" + key + "'");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw fail("expected '" + key + "', got '" + k + "'");
    std::vector<std::string> rest;
    for (std::string t; ls >> t;) rest.push_back(t);
    return rest;
  };
  auto alphabet = [&](const std::string& key) {
    const auto labels = keyed(key);
    try {
      return Alphabet(labels);
    } catch (const InputError& e) {
      throw fail(e.what());
    }
  };

  {
    const auto v = keyed("byzrelay-channel");
    if (v.size() != 1 || v[0] != std::to_string(kChannelFormatVersion))
      throw fail("unsupported format version");
  }
  const Alphabet x1 = alphabet("x1");
  const Alphabet x2 = alphabet("x2");
  const Alphabet u = alphabet("u");
  if (!keyed("law").empty()) throw fail("'law' takes no arguments");

  const std::size_t rows = x1.size() * x2.size();
  std::vector<double> table;
  table.reserve(rows * u.size());
  for (std::size_t r = 0; r < rows; ++r) {
    if (!next_line())
      throw fail("expected " + std::to_string(rows) + " law rows, found " + std::to_string(r));
    std::istringstream ls(line);
    std::vector<double> row;
    for (std::string tok; ls >> tok;) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) throw fail("'" + tok + "' is not a decimal number");
      if (v < 0.0) throw fail("negative probability " + tok);
      row.push_back(v);
    }
    if (row.size() != u.size())
      throw fail("row has " + std::to_string(row.size()) + " entries, expected " +
                 std::to_string(u.size()));
    double sum = 0.0;
    for (double v : row) sum += v;
    if (std::abs(sum - 1.0) > kChannelRowTol)
      throw fail("row sums to " + std::to_string(sum) + ", not 1");
    for (double v : row) table.push_back(v / sum);
  }
  if (next_line()) throw fail("trailing content after the law table");
  return MacChannel(x1, x2, u, std::move(table));
}

inline MacChannel load_channel(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open channel file '" + path + "'");
  return read_channel(f, path);
}

inline void write_channel(std::ostream& os, const MacChannel& ch) {
  os << "byzrelay-channel " << kChannelFormatVersion << '\n';
  auto labels = [&](const char* key, const Alphabet& a) {
    os << key;
    for (const auto& l : a.labels()) os << ' ' << l;
    os << '\n';
  };
  labels("x1", ch.x1());
  labels("x2", ch.x2());
  labels("u", ch.u());
  os << "law\n" << std::setprecision(17);
  for (std::size_t a = 0; a < ch.x1().size(); ++a)
    for (std::size_t b = 0; b < ch.x2().size(); ++b) {
      for (std::size_t k = 0; k < ch.u().size(); ++k)
        os << (k ? " " : "")
           << ch.prob(static_cast<Symbol>(k), static_cast<Symbol>(a), static_cast<Symbol>(b));
      os << '\n';
    }
}

}  // namespace byzrelay

#endif  // BYZRELAY_CHANNEL_IO_HPP
