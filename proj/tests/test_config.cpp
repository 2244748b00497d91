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

#include <string>

#include "doctest.h"
#include "sqgrav/config.hpp"
#include "sqgrav/errors.hpp"

using namespace sqgrav;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty document gives the full defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.campaign.t1 == 455e-6);
  CHECK(cfg.campaign.t2 == 155e-6);
  CHECK(cfg.timing.tau_bm == 60e-6);
  CHECK(cfg.timing.t_sep == 77e-6);
  CHECK(cfg.campaign.cycle_time == 52.0);
  CHECK(cfg.campaign.alpha == doctest::Approx(9.8126 * cfg.constants.k_eff));
  CHECK(cfg.threads == 1);
}

TEST_CASE("shipped defaults file equals the built-in defaults") {
  const auto file = load_config(SQGRAV_DEFAULTS_FILE);
  const auto builtin = parse_config("");
  CHECK(canonical_config(file) == canonical_config(builtin));
  CHECK(config_hash(file) == config_hash(builtin));
}

TEST_CASE("values are read with units in the key") {
  const auto cfg = parse_config(R"(
timing:
  big_t_s: 300e-6
campaign:
  n_pairs: 12
  seed: 123456789012
  threads: 4
noise:
  apply_raman_efficiency: true
)");
  CHECK(cfg.timing.big_t == 300e-6);
  CHECK(cfg.campaign.n_pairs == 12);
  CHECK(cfg.campaign.seed == 123456789012ULL);
  CHECK(cfg.threads == 4);
  CHECK(cfg.noise.apply_raman_efficiency);
}

TEST_CASE("invalid values are rejected with the key and line") {
  const auto neg = error_of("timing:\n  tau_bm_s: -1\n");
  CHECK(neg.find("timing.tau_bm_s") != std::string::npos);
  CHECK(neg.find("line 2") != std::string::npos);
  const auto unknown = error_of("noise:\n  contrast: 0.9\n  foo: 1\n");
  CHECK(unknown.find("foo") != std::string::npos);
  CHECK(error_of("bar: 1\n").find("bar") != std::string::npos);
  CHECK(error_of("campaign:\n  n_pairs: many\n").find("integer") != std::string::npos);
  CHECK(error_of("noise:\n  contrast: 1.5\n").find("(0, 1]") != std::string::npos);
  CHECK(!error_of("timing: [1, 2]\n").empty());
  CHECK(!error_of("timing:\n  big_t_s: [oops\n").empty());
  // cross-field invariant
  CHECK(!error_of("campaign:\n  t1_s: 1e-4\n  t2_s: 1e-4\n").empty());
  CHECK(!error_of("squeezing:\n  xi_min_db: -3\n  xi_max_db: 2\n").empty());
}

TEST_CASE("config hash tracks content but not thread count") {
  const auto a = parse_config("");
  const auto b = parse_config("campaign:\n  threads: 8\n");
  const auto c = parse_config("campaign:\n  seed: 8\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(canonical_config(a).find("campaign.seed = 7") != std::string::npos);
}

TEST_CASE("squeezed and coherent budgets share the technical noise") {
  const auto cfg = parse_config("");
  const auto sq = cfg.squeezed_noise();
  const auto coh = cfg.coherent_noise();
  CHECK(sq.squeezing.r == doctest::Approx(1.1303).epsilon(1e-4));
  CHECK(coh.squeezing.r == 0.0);
  CHECK(coh.squeezing.sigma_det == sq.squeezing.sigma_det);
  CHECK(coh.sigma_ac == sq.sigma_ac);
}

TEST_CASE("manifest serializes every field") {
  RunManifest m;
  m.config_hash = 0xabcULL;
  m.seed = 7;
  m.version = "1.2.3";
  m.command_line = {"simulate", "--pairs", "5"};
  m.started_utc = "2026-01-01T00:00:00Z";
  m.outputs = {"shots.jsonl"};
  const auto json = m.to_json();
  CHECK(json.find("\"config_hash\": \"0000000000000abc\"") != std::string::npos);
  CHECK(json.find("\"finished_utc\": null") != std::string::npos);
  CHECK(json.find("\"--pairs\"") != std::string::npos);
  CHECK(utc_timestamp().size() == 20);
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(load_config("/nonexistent/sqgrav.yaml"), ConfigError);
}
