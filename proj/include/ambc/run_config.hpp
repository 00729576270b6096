#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ambc/config.hpp"
#include "ambc/errors.hpp"
#include "ambc/montecarlo.hpp"

namespace ambc {

/// Parsed JSON run configuration plus the canonical document it came from
/// (after command-line overrides), which is what gets hashed.
struct RunConfig {
  SweepSpec spec;
  nlohmann::json document;
};

inline constexpr std::string_view kRunConfigKeys[] = {
    "m",         "n",    "k",      "gamma_db", "delta_gamma_db", "noise_var_dbm",  "modulation", "prior_c1",
    "m_index",   "seed", "axis",   "values",   "trials",         "detectors",      "threshold_mode",
    "pfa_target"};

namespace detail {

inline std::string kind_error(const std::string& key, const char* expected) {
  return "config key '" + key + "' must be " + expected;
}

inline double json_db(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v.get<std::string>() == "-inf" || v.get<std::string>() == "-Infinity")) {
    return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError(kind_error(key, "a number or \"-inf\""));
}

inline double json_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(kind_error(key, "a number"));
  return v.get<double>();
}

inline std::int64_t json_integer(const nlohmann::json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(kind_error(key, "an integer"));
}

inline std::string json_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(kind_error(key, "a string"));
  return v.get<std::string>();
}

/// Sweep values are kept as text: numbers in their JSON spelling, strings verbatim.
inline std::string json_value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError("sweep values must be numbers or strings");
}

}  // namespace detail

inline ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "analytic") return ThresholdMode::Analytic;
  if (text == "calibrated") return ThresholdMode::Calibrated;
  throw ConfigError("threshold_mode must be \"analytic\" or \"calibrated\"");
}

inline std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::Analytic ? "analytic" : "calibrated";
}

inline RunConfig parse_run_config(const nlohmann::json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const std::set<std::string_view> known(std::begin(kRunConfigKeys), std::end(kRunConfigKeys));
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  RunConfig rc;
  rc.document = doc;
  auto& cfg = rc.spec.base;
  auto& spec = rc.spec;
  for (const auto& [key, v] : doc.items()) {
    if (key == "m") {
      cfg.m = static_cast<int>(json_integer(v, key));
    } else if (key == "n") {
      cfg.n = static_cast<int>(json_integer(v, key));
    } else if (key == "k") {
      if (v.is_string()) {
        cfg.k = IdaskRatio::parse(v.get<std::string>());
      } else {
        cfg.k = IdaskRatio::from_double(json_number(v, key));
      }
    } else if (key == "gamma_db") {
      cfg.gamma_db = json_db(v, key);
    } else if (key == "delta_gamma_db") {
      cfg.delta_gamma_db = json_db(v, key);
    } else if (key == "noise_var_dbm") {
      cfg.noise_var_dbm = json_number(v, key);
    } else if (key == "modulation") {
      cfg.modulation = parse_modulation(json_string(v, key));
    } else if (key == "prior_c1") {
      cfg.prior_c1 = json_number(v, key);
    } else if (key == "m_index") {
      cfg.m_index = static_cast<int>(json_integer(v, key));
    } else if (key == "seed") {
      const auto s = json_integer(v, key);
      if (s < 0) throw ConfigError("seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "axis") {
      spec.axis = json_string(v, key);
    } else if (key == "values") {
      if (!v.is_array()) throw ConfigError(kind_error(key, "an array"));
      spec.values.clear();
      for (const auto& item : v) spec.values.push_back(json_value_text(item));
    } else if (key == "trials") {
      const auto t = json_integer(v, key);
      if (t < 0) throw ConfigError("trials must be positive");
      spec.trials = static_cast<std::uint64_t>(t);
    } else if (key == "detectors") {
      if (!v.is_array()) throw ConfigError(kind_error(key, "an array"));
      spec.detectors.clear();
      for (const auto& item : v) spec.detectors.push_back(parse_detector(json_string(item, key)));
    } else if (key == "threshold_mode") {
      spec.threshold_mode = parse_threshold_mode(json_string(v, key));
    } else if (key == "pfa_target") {
      spec.pfa_target = json_number(v, key);
    }
  }
  if (spec.axis == "none" && !doc.contains("values")) spec.values = {""};
  spec.validate();
  for (const auto& value : spec.values) (void)apply_axis(spec, value);
  return rc;
}

inline RunConfig parse_run_config_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config_text(buffer.str());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the canonical (key-sorted, compact) JSON text.
inline std::string config_hash(const nlohmann::json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

}  // namespace ambc
