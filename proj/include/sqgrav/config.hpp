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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sqgrav/sensitivity.hpp"
#include "sqgrav/shots.hpp"

namespace sqgrav {

/// Squeezing levels the input-state model is calibrated to.
struct SqueezingTargets {
  double atoms = 6000;
  double xi_min_db = -5.4;
  double xi_max_db = 9.9;
  double phi_opt = 1.2 * std::numbers::pi;
};

struct AppConfig {
  SequenceTiming timing;
  PhysicalConstants constants;
  SqueezingTargets squeezing;
  NoiseConfig noise = NoiseConfig::squeezed_default();  // squeezing model derived from targets
  CampaignConfig campaign;
  unsigned threads = 1;
  std::string output_dir = ".";

  /// Noise budget with the calibrated squeezed input.
  NoiseConfig squeezed_noise() const;
  /// Same budget with r = 0 (squeezing generation omitted).
  NoiseConfig coherent_noise() const;

  void validate() const;
};

/// Parses nested YAML sections (timing, constants, squeezing, noise, campaign,
/// output_dir). Missing keys take defaults; unknown keys, non-numeric values and
/// invariant violations throw ConfigError naming the key and line.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

/// Deterministic "section.key = value" listing with 17 significant digits.
std::string canonical_config(const AppConfig& config);

/// FNV-1a 64 of canonical_config.
std::uint64_t config_hash(const AppConfig& config);

/// Provenance record written next to every generated data set.
struct RunManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> command_line;
  std::string started_utc;
  std::string finished_utc;  // empty until finalized
  std::string canonical_config;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace sqgrav
