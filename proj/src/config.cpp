// Copyright 2026 The sqgrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqgrav/config.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "sqgrav/errors.hpp"

namespace sqgrav {

namespace {

std::string where(const YAML::Node& node) {
  return node.Mark().is_null() ? std::string("?") : std::to_string(node.Mark().line + 1);
}

[[noreturn]] void fail(const std::string& key, const YAML::Node& node, const std::string& what) {
  throw ConfigError("config line " + where(node) + ": key '" + key + "' " + what);
}

double as_double(const std::string& key, const YAML::Node& node) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(key, node, "expects a number");
  }
}

std::int64_t as_int(const std::string& key, const YAML::Node& node) {
  try {
    return node.as<std::int64_t>();
  } catch (const YAML::Exception&) {
    fail(key, node, "expects an integer");
  }
}

bool as_bool(const std::string& key, const YAML::Node& node) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(key, node, "expects true or false");
  }
}

using Setter = std::function<void(const std::string&, const YAML::Node&)>;

void read_section(const YAML::Node& section, const std::string& name,
                  const std::map<std::string, Setter>& setters) {
  if (!section.IsMap()) fail(name, section, "must be a mapping");
  for (const auto& item : section) {
    const std::string key = item.first.as<std::string>();
    const std::string full = name + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) fail(full, item.first, "is unknown");
    it->second(full, item.second);
  }
}

template <typename Check>
void require(bool ok, const std::string& key, const YAML::Node& node, Check&& message) {
  if (!ok) fail(key, node, message);
}

}  // namespace

NoiseConfig AppConfig::squeezed_noise() const {
  NoiseConfig n = noise;
  n.squeezing = calibrate(squeezing.xi_min_db, squeezing.xi_max_db, squeezing.atoms,
                          squeezing.phi_opt);
  return n;
}

NoiseConfig AppConfig::coherent_noise() const {
  NoiseConfig n = squeezed_noise();
  n.squeezing = n.squeezing.coherent();
  return n;
}

void AppConfig::validate() const {
  timing.validate();
  constants.validate();
  squeezed_noise().validate();
  campaign.validate();
  if (threads < 1) throw ConfigError("campaign.threads must be >= 1");
}

AppConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  AppConfig cfg;
  bool alpha_given = false;

  auto positive = [](double& target) {
    return [&target](const std::string& key, const YAML::Node& node) {
      const double v = as_double(key, node);
      require(v > 0.0, key, node, "must be > 0");
      target = v;
    };
  };
  auto non_negative = [](double& target) {
    return [&target](const std::string& key, const YAML::Node& node) {
      const double v = as_double(key, node);
      require(v >= 0.0, key, node, "must be >= 0");
      target = v;
    };
  };
  auto any_number = [](double& target) {
    return [&target](const std::string& key, const YAML::Node& node) {
      target = as_double(key, node);
    };
  };

  if (root.IsNull()) {
    // empty document: all defaults
  } else if (!root.IsMap()) {
    throw ConfigError("config line " + where(root) + ": top level must be a mapping");
  } else {
    for (const auto& item : root) {
      const std::string section = item.first.as<std::string>();
      const YAML::Node& body = item.second;
      if (section == "timing") {
        read_section(body, section,
                     {{"tau_bm_s", positive(cfg.timing.tau_bm)},
                      {"t_sep_s", positive(cfg.timing.t_sep)},
                      {"big_t_s", positive(cfg.timing.big_t)},
                      {"t0_s", any_number(cfg.timing.t0)}});
      } else if (section == "constants") {
        read_section(body, section, {{"k_eff_per_m", positive(cfg.constants.k_eff)}});
      } else if (section == "squeezing") {
        read_section(body, section,
                     {{"atoms", positive(cfg.squeezing.atoms)},
                      {"xi_min_db", any_number(cfg.squeezing.xi_min_db)},
                      {"xi_max_db", any_number(cfg.squeezing.xi_max_db)},
                      {"phi_opt_rad", any_number(cfg.squeezing.phi_opt)}});
      } else if (section == "noise") {
        read_section(
            body, section,
            {{"contrast",
              [&](const std::string& key, const YAML::Node& node) {
                const double v = as_double(key, node);
                require(v > 0.0 && v <= 1.0, key, node, "must be in (0, 1]");
                cfg.noise.contrast = v;
              }},
             {"raman_efficiency",
              [&](const std::string& key, const YAML::Node& node) {
                const double v = as_double(key, node);
                require(v > 0.0 && v <= 1.0, key, node, "must be in (0, 1]");
                cfg.noise.raman_efficiency = v;
              }},
             {"apply_raman_efficiency",
              [&](const std::string& key, const YAML::Node& node) {
                cfg.noise.apply_raman_efficiency = as_bool(key, node);
              }},
             {"sigma_ac_rad", non_negative(cfg.noise.sigma_ac)},
             {"sigma_raman_phase_rad", non_negative(cfg.noise.sigma_raman_phase)},
             {"atom_number_mean",
              [&](const std::string& key, const YAML::Node& node) {
                const double v = as_double(key, node);
                require(v >= 2.0, key, node, "must be >= 2");
                cfg.noise.atom_number_mean = v;
              }},
             {"atom_number_sigma", non_negative(cfg.noise.atom_number_sigma)},
             {"sigma_accel_m_per_s2", non_negative(cfg.noise.sigma_accel)}});
      } else if (section == "campaign") {
        read_section(
            body, section,
            {{"t1_s", positive(cfg.campaign.t1)},
             {"t2_s", positive(cfg.campaign.t2)},
             {"alpha_rad_per_s2",
              [&](const std::string& key, const YAML::Node& node) {
                cfg.campaign.alpha = as_double(key, node);
                alpha_given = true;
              }},
             {"g_true_m_per_s2", positive(cfg.campaign.g_true)},
             {"n_pairs",
              [&](const std::string& key, const YAML::Node& node) {
                const auto v = as_int(key, node);
                require(v >= 1, key, node, "must be >= 1");
                cfg.campaign.n_pairs = v;
              }},
             {"cycle_time_s", positive(cfg.campaign.cycle_time)},
             {"seed",
              [&](const std::string& key, const YAML::Node& node) {
                try {
                  cfg.campaign.seed = node.as<std::uint64_t>();
                } catch (const YAML::Exception&) {
                  fail(key, node, "expects a non-negative integer");
                }
              }},
             {"threads", [&](const std::string& key, const YAML::Node& node) {
                const auto v = as_int(key, node);
                require(v >= 1 && v <= 1024, key, node, "must be in [1, 1024]");
                cfg.threads = static_cast<unsigned>(v);
              }}});
      } else if (section == "output_dir") {
        cfg.output_dir = body.as<std::string>();
      } else {
        fail(section, item.first, "is unknown");
      }
    }
  }
  if (!alpha_given) cfg.campaign.alpha = 9.8126 * cfg.constants.k_eff;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config invariant violated: ") + e.what());
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_config(const AppConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, double v) { out += fmt::format("{} = {:.17g}\n", key, v); };
  put("timing.tau_bm_s", c.timing.tau_bm);
  put("timing.t_sep_s", c.timing.t_sep);
  put("timing.big_t_s", c.timing.big_t);
  put("timing.t0_s", c.timing.t0);
  put("constants.k_eff_per_m", c.constants.k_eff);
  put("squeezing.atoms", c.squeezing.atoms);
  put("squeezing.xi_min_db", c.squeezing.xi_min_db);
  put("squeezing.xi_max_db", c.squeezing.xi_max_db);
  put("squeezing.phi_opt_rad", c.squeezing.phi_opt);
  put("noise.contrast", c.noise.contrast);
  put("noise.raman_efficiency", c.noise.raman_efficiency);
  out += fmt::format("noise.apply_raman_efficiency = {}\n", c.noise.apply_raman_efficiency);
  put("noise.sigma_ac_rad", c.noise.sigma_ac);
  put("noise.sigma_raman_phase_rad", c.noise.sigma_raman_phase);
  put("noise.atom_number_mean", c.noise.atom_number_mean);
  put("noise.atom_number_sigma", c.noise.atom_number_sigma);
  put("noise.sigma_accel_m_per_s2", c.noise.sigma_accel);
  put("campaign.t1_s", c.campaign.t1);
  put("campaign.t2_s", c.campaign.t2);
  put("campaign.alpha_rad_per_s2", c.campaign.alpha);
  put("campaign.g_true_m_per_s2", c.campaign.g_true);
  out += fmt::format("campaign.n_pairs = {}\n", c.campaign.n_pairs);
  put("campaign.cycle_time_s", c.campaign.cycle_time);
  out += fmt::format("campaign.seed = {}\n", c.campaign.seed);
  return out;
}

std::uint64_t config_hash(const AppConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["toolkit_version"] = version;
  j["config_hash"] = fmt::format("{:016x}", config_hash);
  j["seed"] = seed;
  j["command_line"] = command_line;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(finished_utc);
  j["outputs"] = outputs;
  j["config"] = canonical_config;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sqgrav
