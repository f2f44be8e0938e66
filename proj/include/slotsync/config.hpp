#pragma once

// Run configuration for the command-line front end (JSON in, JSON out).
// Scalars are accepted wherever a sweep list is expected.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "slotsync/channel.hpp"
#include "slotsync/detector.hpp"
#include "slotsync/search.hpp"

#ifndef SLOTSYNC_VERSION
#define SLOTSYNC_VERSION "0.1.0"
#endif

namespace slotsync {

using nlohmann::json;

inline constexpr const char* kVersion = SLOTSYNC_VERSION;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double fa = 0.10, md = 0.10, de = 0.15;
};

struct VerifySettings {
  std::vector<std::size_t> dominance_n{2, 3, 4};
  std::vector<std::size_t> dominance_m{1, 2, 3};
  std::uint64_t dominance_codebooks = 20;
  std::uint64_t dominance_partitions = 100;
  std::size_t inclusion_max_n = 10;
  std::vector<double> inclusion_alpha{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> inclusion_beta{-1.0, -0.5, 0.0, 0.5, 1.0};
  bool oracle = true;
  double oracle_tolerance = 5e-3;
};

struct RunConfig {
  std::vector<std::vector<double>> channel{{0.95, 0.05}, {0.8, 0.2}, {0.2, 0.8}};
  std::size_t silent = 0;
  std::vector<double> composition;  // over non-silent inputs; uniform when empty
  std::vector<double> rate{0.1};
  std::optional<std::size_t> m;     // overrides rate for simulate/compare
  std::vector<std::size_t> n{6, 8, 10};
  std::vector<double> alpha{0.0};
  std::vector<double> beta{0.3};
  std::uint64_t trials = 100000;
  std::uint64_t codebooks = 200;
  double budget = kDefaultEnumerationBudget;
  std::uint64_t seed = 1;
  Tolerances tolerance;
  SearchOptions search;
  VerifySettings verify;
  std::string simulations;  // simulate output consumed by compare
  std::string output;

  Dmc dmc() const { return Dmc(channel, silent); }

  Distribution composition_distribution() const {
    const Dmc d = dmc();
    if (composition.empty()) return Distribution::uniform(d.num_inputs());
    if (composition.size() != d.num_inputs())
      throw ConfigError("composition has " + std::to_string(composition.size()) + " entries, channel has " +
                        std::to_string(d.num_inputs()) + " non-silent inputs");
    return Distribution(composition);
  }

  /// Integer composition of length n (largest remainder rounding of n P).
  TypeDescriptor composition_counts(std::size_t len) const {
    const Distribution p = composition_distribution();
    std::vector<std::int64_t> c(p.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::int64_t used = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double v = p[i] * static_cast<double>(len);
      c[i] = static_cast<std::int64_t>(std::floor(v + 1e-9));
      used += c[i];
      rem.emplace_back(v - static_cast<double>(c[i]), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < static_cast<std::int64_t>(len); ++k, ++used) ++c[rem[k % rem.size()].second];
    return TypeDescriptor(std::move(c));
  }

  /// M = max(1, round(e^{nR})) unless given explicitly.
  std::size_t codebook_size(std::size_t len) const {
    if (m) return *m;
    const double v = std::round(std::exp(static_cast<double>(len) * rate.front()));
    if (!(v < 1e15)) throw ConfigError("e^{nR} too large for n = " + std::to_string(len));
    return std::max<std::size_t>(1, static_cast<std::size_t>(v));
  }

  void validate() const {
    try {
      (void)dmc();
      (void)composition_distribution();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (rate.empty() || n.empty() || alpha.empty() || beta.empty()) throw ConfigError("sweep lists must be nonempty");
    for (double r : rate)
      if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rate must be finite and >= 0");
    for (auto v : n)
      if (v == 0) throw ConfigError("block length must be positive");
    for (double a : alpha)
      if (!std::isfinite(a)) throw ConfigError("alpha must be finite");
    for (double b : beta)
      if (!std::isfinite(b)) throw ConfigError("beta must be finite");
    if (m && *m == 0) throw ConfigError("m must be >= 1");
    if (trials == 0 || codebooks == 0) throw ConfigError("trials and codebooks must be >= 1");
    if (!(budget > 0.0)) throw ConfigError("budget must be positive");
    if (search.grid_resolution < 1 || search.restarts < 1) throw ConfigError("search settings must be positive");
  }
};

namespace detail {

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const char* known[] = {"channel", "composition", "rate", "m", "n", "alpha", "beta", "trials", "codebooks",
                                  "budget", "seed", "tolerance", "search", "verify", "simulations", "output"};
    for (const auto& [k, v] : j.items())
      if (std::find(std::begin(known), std::end(known), k) == std::end(known)) throw ConfigError("unknown config key: " + k);
    if (j.contains("channel")) {
      const json& ch = j.at("channel");
      c.channel = ch.at("rows").get<std::vector<std::vector<double>>>();
      c.silent = ch.value("silent", std::size_t{0});
    }
    if (j.contains("composition")) c.composition = j.at("composition").get<std::vector<double>>();
    if (j.contains("rate")) c.rate = detail::scalar_or_list<double>(j, "rate");
    if (j.contains("m") && !j.at("m").is_null()) c.m = j.at("m").get<std::size_t>();
    if (j.contains("n")) c.n = detail::scalar_or_list<std::size_t>(j, "n");
    if (j.contains("alpha")) c.alpha = detail::scalar_or_list<double>(j, "alpha");
    if (j.contains("beta")) c.beta = detail::scalar_or_list<double>(j, "beta");
    c.trials = j.value("trials", c.trials);
    c.codebooks = j.value("codebooks", c.codebooks);
    c.budget = j.value("budget", c.budget);
    c.seed = j.value("seed", c.seed);
    if (j.contains("tolerance")) {
      const json& t = j.at("tolerance");
      if (t.is_number()) {
        c.tolerance.fa = c.tolerance.md = c.tolerance.de = t.get<double>();
      } else {
        c.tolerance.fa = t.value("fa", c.tolerance.fa);
        c.tolerance.md = t.value("md", c.tolerance.md);
        c.tolerance.de = t.value("de", c.tolerance.de);
      }
    }
    if (j.contains("search")) {
      const json& s = j.at("search");
      c.search.grid_resolution = s.value("grid_resolution", c.search.grid_resolution);
      c.search.restarts = s.value("restarts", c.search.restarts);
      c.search.step_tolerance = s.value("step_tolerance", c.search.step_tolerance);
    }
    if (j.contains("verify")) {
      const json& v = j.at("verify");
      auto& s = c.verify;
      if (v.contains("dominance_n")) s.dominance_n = v.at("dominance_n").get<std::vector<std::size_t>>();
      if (v.contains("dominance_m")) s.dominance_m = v.at("dominance_m").get<std::vector<std::size_t>>();
      s.dominance_codebooks = v.value("dominance_codebooks", s.dominance_codebooks);
      s.dominance_partitions = v.value("dominance_partitions", s.dominance_partitions);
      s.inclusion_max_n = v.value("inclusion_max_n", s.inclusion_max_n);
      if (v.contains("inclusion_alpha")) s.inclusion_alpha = v.at("inclusion_alpha").get<std::vector<double>>();
      if (v.contains("inclusion_beta")) s.inclusion_beta = v.at("inclusion_beta").get<std::vector<double>>();
      s.oracle = v.value("oracle", s.oracle);
      s.oracle_tolerance = v.value("oracle_tolerance", s.oracle_tolerance);
    }
    c.simulations = j.value("simulations", std::string{});
    c.output = j.value("output", std::string{});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["channel"] = {{"rows", c.channel}, {"silent", c.silent}};
  j["composition"] = c.composition.empty() ? c.composition_distribution().probs() : c.composition;
  j["rate"] = c.rate;
  j["m"] = c.m ? json(*c.m) : json(nullptr);
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["trials"] = c.trials;
  j["codebooks"] = c.codebooks;
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  j["tolerance"] = {{"fa", c.tolerance.fa}, {"md", c.tolerance.md}, {"de", c.tolerance.de}};
  j["search"] = {{"grid_resolution", c.search.grid_resolution},
                 {"restarts", c.search.restarts},
                 {"step_tolerance", c.search.step_tolerance}};
  const auto& v = c.verify;
  j["verify"] = {{"dominance_n", v.dominance_n},
                 {"dominance_m", v.dominance_m},
                 {"dominance_codebooks", v.dominance_codebooks},
                 {"dominance_partitions", v.dominance_partitions},
                 {"inclusion_max_n", v.inclusion_max_n},
                 {"inclusion_alpha", v.inclusion_alpha},
                 {"inclusion_beta", v.inclusion_beta},
                 {"oracle", v.oracle},
                 {"oracle_tolerance", v.oracle_tolerance}};
  j["simulations"] = c.simulations;
  j["output"] = c.output;
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

/// +inf has no JSON literal; it is written as the string "inf".
inline json extended(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double extended_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError("expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

}  // namespace slotsync
