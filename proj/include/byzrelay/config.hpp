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

#ifndef BYZRELAY_CONFIG_HPP
#define BYZRELAY_CONFIG_HPP

// JSON experiment configs. Requires nlohmann/json on the include path.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "byzrelay/channel_io.hpp"
#include "byzrelay/experiment.hpp"

namespace byzrelay {

/// "builtin:erasure", "builtin:uniform" or "builtin:uniform3"; anything else
/// is a channel spec path, resolved against `base_dir` when relative.
inline MacChannel resolve_channel(const std::string& ref, const std::filesystem::path& base_dir) {
  if (ref == "builtin:erasure") return binary_erasure_mac();
  if (ref == "builtin:uniform") return uniform_noise_mac(2);
  if (ref == "builtin:uniform3") return uniform_noise_mac(3);
  if (ref.rfind("builtin:", 0) == 0) throw InputError("unknown builtin channel '" + ref + "'");
  std::filesystem::path p(ref);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return load_channel(p.string());
}

namespace detail {

using json = nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw InputError("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline BehaviorSpec behavior_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config: each behavior must be an object");
  reject_unknown(j, {"kind", "name", "map", "kernel", "side", "fraction", "inner", "offset1", "offset2"},
                 "behavior");
  BehaviorSpec b;
  b.kind = get_or<std::string>(j, "kind", "honest");
  b.name = get_or<std::string>(j, "name", "");
  b.map = get_or<std::vector<int>>(j, "map", {});
  b.kernel = get_or<std::vector<std::vector<double>>>(j, "kernel", {});
  b.side = get_or<int>(j, "side", 1);
  b.fraction = get_or<double>(j, "fraction", 1.0);
  b.offset1 = get_or<std::uint64_t>(j, "offset1", 1);
  b.offset2 = get_or<std::uint64_t>(j, "offset2", 1);
  if (j.contains("inner")) b.inner.push_back(behavior_from_json(j.at("inner")));
  return b;
}

inline json behavior_to_json(const BehaviorSpec& b) {
  json j;
  j["kind"] = b.kind;
  if (!b.name.empty()) j["name"] = b.name;
  if (b.kind == "map") j["map"] = b.map;
  if (b.kind == "substitution") j["kernel"] = b.kernel;
  if (b.kind == "witness-attack") j["side"] = b.side;
  if (b.kind == "partial") {
    j["fraction"] = b.fraction;
    if (!b.inner.empty()) j["inner"] = behavior_to_json(b.inner.front());
  }
  if (b.kind == "reforge") {
    j["offset1"] = b.offset1;
    j["offset2"] = b.offset2;
  }
  return j;
}

}  // namespace detail

/// Parse a config document (JSON; // and /* */ comments allowed). Schedule
/// entries override the channel's default schedule field by field.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::filesystem::path& base_dir = {}) {
  using detail::get_or;
  using detail::json;
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config: top level must be an object");
  detail::reject_unknown(j,
                         {"format", "channel", "p1", "p2", "r1", "r2", "rate_mode", "block_lengths",
                          "behaviors", "trials", "trials_per_codebook", "schedule", "seed",
                          "classify", "max_codewords", "max_evaluations", "threads"},
                         "config");
  if (get_or<int>(j, "format", 1) != 1) throw InputError("config: unsupported format version");

  ExperimentConfig c;
  if (!j.contains("channel")) throw InputError("config: 'channel' is required");
  c.channel_ref = get_or<std::string>(j, "channel", "");
  c.channel = resolve_channel(c.channel_ref, base_dir);
  c.p1 = get_or<Pmf>(j, "p1", uniform_pmf(c.channel.x1().size()));
  c.p2 = get_or<Pmf>(j, "p2", uniform_pmf(c.channel.x2().size()));
  c.r1 = get_or<double>(j, "r1", 0.0);
  c.r2 = get_or<double>(j, "r2", 0.0);
  const auto mode = get_or<std::string>(j, "rate_mode", "plan");
  if (mode == "plan") c.rate_mode = RateMode::Plan;
  else if (mode == "direct") c.rate_mode = RateMode::Direct;
  else throw InputError("config: rate_mode must be 'plan' or 'direct'");
  c.block_lengths = get_or<std::vector<std::size_t>>(j, "block_lengths", {});
  if (j.contains("behaviors")) {
    if (!j.at("behaviors").is_array()) throw InputError("config: 'behaviors' must be an array");
    c.behaviors.clear();
    for (const auto& b : j.at("behaviors")) c.behaviors.push_back(detail::behavior_from_json(b));
  }
  if (j.contains("trials") && j.at("trials").is_number_integer() && j.at("trials").get<long long>() < 1)
    throw InputError("config: trials must be at least 1");
  c.trials = get_or<std::uint64_t>(j, "trials", 100);
  c.trials_per_codebook = get_or<std::uint64_t>(j, "trials_per_codebook", 0);
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.classify = get_or<bool>(j, "classify", false);
  c.max_codewords = get_or<std::uint64_t>(j, "max_codewords", kDefaultMaxCodewords);
  c.max_evaluations = get_or<std::uint64_t>(j, "max_evaluations", kDefaultMaxEvaluations);
  c.threads = get_or<unsigned>(j, "threads", 1);

  c.schedule = default_schedule(c.channel.u().size(), c.channel.x1().size(), c.channel.x2().size());
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    if (!s.is_object()) throw InputError("config: 'schedule' must be an object");
    detail::reject_unknown(s,
                           {"delta_scale", "delta_exponent", "mu_factor", "k_tilde", "lambda_scale",
                            "lambda_exponent", "mu_prime_mult", "mu_double_prime_mult",
                            "mu_tilde_mult", "mu_hat_mult"},
                           "schedule");
    auto& t = c.schedule;
    t.delta_scale = get_or<double>(s, "delta_scale", t.delta_scale);
    t.delta_exponent = get_or<double>(s, "delta_exponent", t.delta_exponent);
    t.mu_factor = get_or<double>(s, "mu_factor", t.mu_factor);
    t.k_tilde = get_or<double>(s, "k_tilde", t.k_tilde);
    t.lambda_scale = get_or<double>(s, "lambda_scale", t.lambda_scale);
    t.lambda_exponent = get_or<double>(s, "lambda_exponent", t.lambda_exponent);
    t.mu_prime_mult = get_or<double>(s, "mu_prime_mult", t.mu_prime_mult);
    t.mu_double_prime_mult = get_or<double>(s, "mu_double_prime_mult", t.mu_double_prime_mult);
    t.mu_tilde_mult = get_or<double>(s, "mu_tilde_mult", t.mu_tilde_mult);
    t.mu_hat_mult = get_or<double>(s, "mu_hat_mult", t.mu_hat_mult);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path());
}

/// Serialize with every field explicit; parse_config(config_to_json(c)) == c.
inline std::string config_to_json(const ExperimentConfig& c) {
  detail::json j;
  j["format"] = 1;
  j["channel"] = c.channel_ref;
  j["p1"] = c.p1;
  j["p2"] = c.p2;
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["rate_mode"] = c.rate_mode == RateMode::Plan ? "plan" : "direct";
  j["block_lengths"] = c.block_lengths;
  j["behaviors"] = detail::json::array();
  for (const auto& b : c.behaviors) j["behaviors"].push_back(detail::behavior_to_json(b));
  j["trials"] = c.trials;
  j["trials_per_codebook"] = c.trials_per_codebook;
  j["seed"] = c.seed;
  j["classify"] = c.classify;
  j["max_codewords"] = c.max_codewords;
  j["max_evaluations"] = c.max_evaluations;
  j["threads"] = c.threads;
  const auto& t = c.schedule;
  j["schedule"] = {{"delta_scale", t.delta_scale},
                   {"delta_exponent", t.delta_exponent},
                   {"mu_factor", t.mu_factor},
                   {"k_tilde", t.k_tilde},
                   {"lambda_scale", t.lambda_scale},
                   {"lambda_exponent", t.lambda_exponent},
                   {"mu_prime_mult", t.mu_prime_mult},
                   {"mu_double_prime_mult", t.mu_double_prime_mult},
                   {"mu_tilde_mult", t.mu_tilde_mult},
                   {"mu_hat_mult", t.mu_hat_mult}};
  return j.dump(2) + "\n";
}

}  // namespace byzrelay

#endif  // BYZRELAY_CONFIG_HPP
