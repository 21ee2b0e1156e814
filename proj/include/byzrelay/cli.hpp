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

#ifndef BYZRELAY_CLI_HPP
#define BYZRELAY_CLI_HPP

// Command-line front end. Requires CLI11 and nlohmann/json on the include path.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "byzrelay/config.hpp"
#include "byzrelay/region.hpp"

namespace byzrelay {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitResource = 2 };

namespace cli_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// P(symbol 1) for binary pmfs, otherwise the whole pmf joined by ';'.
inline std::string pmf_cell(const Pmf& p) {
  if (p.size() == 2) return num(p[1]);
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + num(p[i]);
  return s;
}

inline Pmf parse_pmf(const std::string& text, std::size_t size, const char* what) {
  if (text.empty()) return uniform_pmf(size);
  Pmf p;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": '" + tok + "' is not a number");
    }
  }
  // A single number on a binary alphabet is P(symbol 1).
  if (p.size() == 1 && size == 2) p = bernoulli(p[0]);
  validate_pmf(p, size, 1e-9, what);
  return p;
}

/// Output sink: the file named by --out, or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 1) throw InputError("grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

inline int do_check(const std::string& channel_ref, std::size_t grid, double lo, double hi,
                    std::ostream& out) {
  const auto ch = resolve_channel(channel_ref, {});
  auto pmfs = [&](std::size_t size) {
    std::vector<Pmf> g;
    if (size == 2) {
      if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw InputError("check: need 0 <= lo <= hi <= 1");
      for (double p : linspace(lo, hi, grid)) g.push_back(bernoulli(p));
    } else {
      g = simplex_lattice(size, grid);
    }
    return g;
  };
  const auto g1 = pmfs(ch.x1().size());
  const auto g2 = pmfs(ch.x2().size());
  const auto id = ConditionalPmf::identity(ch.u().size());
  out << "p,q,side1,side2,trace1,trace2\n";
  for (const auto& p1 : g1)
    for (const auto& p2 : g2) {
      const auto w1 = find_witness(observation_channel(ch, p2, Side::One), id);
      const auto w2 = find_witness(observation_channel(ch, p1, Side::Two), id);
      out << pmf_cell(p1) << ',' << pmf_cell(p2) << ',' << (w1 ? "Manipulable" : "NonManipulable")
          << ',' << (w2 ? "Manipulable" : "NonManipulable") << ','
          << (w1 ? num(w1->trace) : "") << ',' << (w2 ? num(w2->trace) : "") << '\n';
    }
  return kExitOk;
}

inline void emit_region(std::ostream& out, const char* name, const RateRegion& r, double scale) {
  for (std::size_t i = 0; i < r.vertices.size(); ++i)
    out << name << ',' << i << ',' << num(scale * r.vertices[i].r1) << ','
        << num(scale * r.vertices[i].r2) << '\n';
}

inline int do_region(const std::string& channel_ref, std::size_t grid, bool unconstrained,
                     const std::string& points_path, bool half_duplex, std::ostream& out,
                     std::ostream& err) {
  const auto ch = resolve_channel(channel_ref, {});
  const double scale = half_duplex ? 0.5 : 1.0;
  const auto sweep = sweep_region(ch, grid, true);
  out << "region,vertex,r1,r2\n";
  emit_region(out, "inner", sweep.region, scale);
  if (sweep.region.empty())
    err << "warning: no grid point satisfies the non-manipulability condition; region is the origin\n";
  if (unconstrained) emit_region(out, "unconstrained", unconstrained_region(ch, grid), scale);
  if (!points_path.empty()) {
    std::ofstream pf(points_path);
    if (!pf) throw InputError("cannot open points file '" + points_path + "'");
    pf << "p,q,side1,side2,i1,i2,passes\n";
    for (const auto& g : sweep.points)
      pf << pmf_cell(g.p1) << ',' << pmf_cell(g.p2) << ','
         << (g.manipulable1 ? "Manipulable" : "NonManipulable") << ','
         << (g.manipulable2 ? "Manipulable" : "NonManipulable") << ',' << num(scale * g.i1) << ','
         << num(scale * g.i2) << ',' << (g.passes() ? 1 : 0) << '\n';
  }
  return kExitOk;
}

inline int do_simulate(const std::string& config_path, const std::string& seed_text,
                       unsigned threads, const std::string& events_path, std::ostream& out) {
  auto cfg = load_config(config_path);
  if (!seed_text.empty()) {
    try {
      cfg.seed = std::stoull(seed_text);
    } catch (const std::exception&) {
      throw InputError("--seed must be an unsigned integer");
    }
  }
  if (threads > 0) cfg.threads = threads;
  const auto res = run_experiment(cfg, !events_path.empty());
  write_results(out, cfg, res);
  if (!events_path.empty()) {
    std::ofstream ef(events_path);
    if (!ef) throw InputError("cannot open event log '" + events_path + "'");
    write_event_log(ef, cfg, res.log);
  }
  return kExitOk;
}

/// Witness search for one side, the derived substitution T, and a Monte
/// Carlo comparison of per-input output histograms with and without T.
inline int do_attack_eval(const std::string& channel_ref, const std::string& p1_text,
                          const std::string& p2_text, int side, std::uint64_t samples,
                          std::uint64_t seed, std::ostream& out) {
  const auto ch = resolve_channel(channel_ref, {});
  if (side != 1 && side != 2) throw InputError("--side must be 1 or 2");
  const Pmf p1 = parse_pmf(p1_text, ch.x1().size(), "--p1");
  const Pmf p2 = parse_pmf(p2_text, ch.x2().size(), "--p2");
  const Side s = side == 1 ? Side::One : Side::Two;
  const auto p_obs = observation_channel(ch, s == Side::One ? p2 : p1, s);
  const std::size_t m = ch.u().size();
  const auto w = find_witness(p_obs, ConditionalPmf::identity(m));

  out << "key,value\n";
  out << "side," << side << '\n';
  if (!w) {
    out << "status,NonManipulable\n";
    return kExitOk;
  }
  out << "status,Manipulable\n";
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out << "upsilon[" << i << "][" << j << "]," << num((*w)(i, j)) << '\n';
  const auto t = witness_to_attack(*w, p_obs);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out << "T[" << i << "][" << j << "]," << num(t(i, j)) << '\n';
  double resid = 0.0;
  for (std::size_t x = 0; x < p_obs.num_columns(); ++x)
    for (std::size_t i = 0; i < m; ++i) {
      double tp = 0.0;
      for (std::size_t j = 0; j < m; ++j) tp += t(i, j) * p_obs(j, x);
      resid = std::max(resid, std::abs(tp - p_obs(i, x)));
    }
  out << "max_abs_TP_minus_P," << num(resid) << '\n';

  // Histograms of the relay output per own input symbol, honest vs attacked.
  if (samples == 0) throw InputError("--samples must be positive");
  Rng rng(seed);
  const Pmf& own_p = s == Side::One ? p1 : p2;
  const std::size_t nx = own_p.size();
  std::vector<std::uint64_t> honest(nx * m, 0), attacked(nx * m, 0), per_x(nx, 0);
  Sequence x1(samples), x2(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    x1[i] = static_cast<Symbol>(sample_index(rng, p1));
    x2[i] = static_cast<Symbol>(sample_index(rng, p2));
  }
  const auto u = transmit_mac(ch, x1, x2, rng);
  const auto v = relay_forward(MemorylessSubstitution{t}, u, Codebook(ch.x1(), p1, 1, 0, 1.0, 0, {0}),
                               Codebook(ch.x2(), p2, 1, 0, 1.0, 0, {0}), rng, m);
  // The honest comparison uses an independent second sample.
  Sequence y1(samples), y2(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    y1[i] = static_cast<Symbol>(sample_index(rng, p1));
    y2[i] = static_cast<Symbol>(sample_index(rng, p2));
  }
  const auto uh = transmit_mac(ch, y1, y2, rng);
  std::vector<std::uint64_t> per_xh(nx, 0);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Symbol xa = s == Side::One ? x1[i] : x2[i];
    const Symbol xh = s == Side::One ? y1[i] : y2[i];
    ++attacked[xa * m + v[i]];
    ++per_x[xa];
    ++honest[xh * m + uh[i]];
    ++per_xh[xh];
  }
  double max_z = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (per_x[x] == 0 || per_xh[x] == 0) continue;
    for (std::size_t k = 0; k < m; ++k) {
      const double fa = static_cast<double>(attacked[x * m + k]) / static_cast<double>(per_x[x]);
      const double fh = static_cast<double>(honest[x * m + k]) / static_cast<double>(per_xh[x]);
      const double pool = p_obs(k, x);
      const double se = std::sqrt(pool * (1.0 - pool) *
                                  (1.0 / static_cast<double>(per_x[x]) + 1.0 / static_cast<double>(per_xh[x])));
      const double z = se > 0.0 ? std::abs(fa - fh) / se : (fa == fh ? 0.0 : INFINITY);
      max_z = std::max(max_z, z);
      out << "hist[x=" << x << "][u=" << k << "]," << num(fh) << ';' << num(fa) << '\n';
    }
  }
  out << "samples," << samples << '\n';
  out << "seed," << seed << '\n';
  out << "max_z," << num(max_z) << '\n';
  out << "indistinguishable_3sigma," << (max_z <= 3.0 ? "yes" : "no") << '\n';
  return kExitOk;
}

}  // namespace cli_detail

/// Entry point shared by the byzrelay tool and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"byzrelay: integrity over a two-way amplify-and-forward relay"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "Write results to this file instead of stdout");

  std::string channel = "builtin:erasure";
  std::size_t grid = 9, region_grid = 33;
  double lo = 0.1, hi = 0.9;
  auto* check = app.add_subcommand("check", "Non-manipulability over an input-distribution grid");
  check->add_option("--channel", channel, "Channel spec file or builtin:erasure|uniform|uniform3");
  check->add_option("--grid", grid, "Grid points per input axis");
  check->add_option("--lo", lo, "Smallest P(X=1) for binary inputs");
  check->add_option("--hi", hi, "Largest P(X=1) for binary inputs");
  check->add_option("--out", out_path, "Output file");

  bool unconstrained = false, half_duplex = false;
  std::string points_path;
  auto* region = app.add_subcommand("region", "Inner-bound rate region as hull vertices");
  region->add_option("--channel", channel, "Channel spec file or builtin name");
  region->add_option("--grid", region_grid, "Lattice points per probability axis");
  region->add_flag("--unconstrained", unconstrained, "Also emit the region without the filter");
  region->add_option("--points", points_path, "Write per-grid-point diagnostics to this file");
  region->add_flag("--half-duplex", half_duplex, "Scale rates by 0.5");
  region->add_option("--out", out_path, "Output file");

  std::string config_path, seed_text, events_path;
  unsigned threads = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo H0/H1 campaign from a config");
  sim->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sim->add_option("--seed", seed_text, "Override the master seed");
  sim->add_option("--threads", threads, "Worker threads");
  sim->add_option("--events", events_path, "Write the per-trial event log here");
  sim->add_option("--out", out_path, "Output file");

  std::string p1_text, p2_text;
  int side = 1;
  std::uint64_t samples = 100000, seed = 1;
  auto* attack = app.add_subcommand("attack-eval", "Witness-derived attack and indistinguishability report");
  attack->add_option("--channel", channel, "Channel spec file or builtin name");
  attack->add_option("--p1", p1_text, "P_X1 as comma list, or P(X1=1) for binary");
  attack->add_option("--p2", p2_text, "P_X2 as comma list, or P(X2=1) for binary");
  attack->add_option("--side", side, "Observation channel side (1 or 2)");
  attack->add_option("--samples", samples, "Monte Carlo samples");
  attack->add_option("--seed", seed, "Sampling seed");
  attack->add_option("--out", out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }

  try {
    cli_detail::Sink sink(out_path, out);
    if (check->parsed()) return cli_detail::do_check(channel, grid, lo, hi, *sink);
    if (region->parsed())
      return cli_detail::do_region(channel, region_grid, unconstrained, points_path, half_duplex,
                                   *sink, err);
    if (sim->parsed()) return cli_detail::do_simulate(config_path, seed_text, threads, events_path, *sink);
    if (attack->parsed())
      return cli_detail::do_attack_eval(channel, p1_text, p2_text, side, samples, seed, *sink);
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const SamplingError& e) {
    err << "sampling error: " << e.what() << '\n';
    return kExitResource;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  err << app.help();
  return kExitInput;
}

}  // namespace byzrelay

#endif  // BYZRELAY_CLI_HPP
