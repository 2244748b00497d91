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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sqgrav/app.hpp"

using namespace sqgrav;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(SQGRAV_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run_cli({}).code == kExitUsage);
  CHECK(run_cli({"bogus"}).code == kExitUsage);
  CHECK(run_cli({"simulate", "--pairs", "x"}).code == kExitUsage);
  CHECK(run_cli({"analyze"}).code == kExitUsage);
  CHECK(run_cli({"--config", "/nonexistent.yaml", "scale-factor"}).code == kExitUsage);
  CHECK(run_cli({"--help"}).code == kExitOk);
}

TEST_CASE("scale-factor prints CSV") {
  const auto r = run_cli({"scale-factor", "--T", "455e-6"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("quantity,value\n", 0) == 0);
  const auto pos = r.out.find("scale_factor_s2_per_m,");
  REQUIRE(pos != std::string::npos);
  const double s = std::stod(r.out.substr(pos + 22));
  CHECK(std::abs(s / 1.4290 - 1.0) < 0.015);
  CHECK(r.out.find("breakpoint_7_s,") != std::string::npos);
}

TEST_CASE("pulse and tomography subcommands") {
  const auto dir = fresh_dir("pulse");
  const auto p = run_cli({"--output-dir", dir.string(), "pulse", "--samples", "11", "--out", "env.csv"});
  REQUIRE(p.code == kExitOk);
  const auto env = slurp(dir / "env.csv");
  CHECK(env.rfind("t_s,envelope,area_rad,g_bm\n", 0) == 0);
  CHECK(std::count(env.begin(), env.end(), '\n') == 12);
  const auto t = run_cli({"tomography", "--points", "9"});
  REQUIRE(t.code == kExitOk);
  CHECK(t.out.rfind("phi_rad,variance_atoms2,xi2_db\n", 0) == 0);
  CHECK(run_cli({"tomography", "--points", "1"}).code == kExitUsage);
}

TEST_CASE("simulate, analyze and allan chain") {
  const auto dir = fresh_dir("chain");
  const std::string d = dir.string();
  REQUIRE(run_cli({"--output-dir", d, "simulate", "--pairs", "200", "--seed", "3", "--out", "s.jsonl"}).code == kExitOk);
  CHECK(fs::exists(dir / "s.jsonl.manifest.json"));
  const auto manifest = slurp(dir / "s.jsonl.manifest.json");
  CHECK(manifest.find("\"finished_utc\": \"") != std::string::npos);
  const auto a = run_cli({"--output-dir", d, "analyze", "--in", "s.jsonl"});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out.find("g_exp_m_per_s2,") != std::string::npos);
  CHECK(a.out.find("xi_m2_db,") != std::string::npos);
  const auto al = run_cli({"--output-dir", d, "allan", "--in", "s.jsonl"});
  REQUIRE(al.code == kExitOk);
  CHECK(al.out.rfind("tau_s,adev,err\n104,", 0) == 0);
}

TEST_CASE("simulate output does not depend on the thread count") {
  const auto dir = fresh_dir("threads");
  const std::string d = dir.string();
  REQUIRE(run_cli({"--output-dir", d, "simulate", "--pairs", "500", "--threads", "1", "--out", "a.jsonl"}).code == 0);
  REQUIRE(run_cli({"--output-dir", d, "simulate", "--pairs", "500", "--threads", "7", "--out", "b.jsonl"}).code == 0);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  REQUIRE(run_cli({"--output-dir", d, "simulate", "--coherent", "--pairs", "500", "--out", "c.jsonl"}).code == 0);
  CHECK(slurp(dir / "a.jsonl") != slurp(dir / "c.jsonl"));
  CHECK(run_cli({"simulate", "--coherent", "--squeezed"}).code == kExitUsage);
}

TEST_CASE("data errors exit with 2") {
  const auto dir = fresh_dir("data");
  std::ofstream(dir / "empty.jsonl").close();
  const auto r = run_cli({"--output-dir", dir.string(), "analyze", "--in", "empty.jsonl"});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("no shot records") != std::string::npos);
  CHECK(run_cli({"--output-dir", dir.string(), "analyze", "--in", "missing.jsonl"}).code == kExitData);
  std::ofstream(dir / "bad.jsonl") << "{\"index\": 1}\n";
  CHECK(run_cli({"--output-dir", dir.string(), "allan", "--in", "bad.jsonl"}).code == kExitData);
}

TEST_CASE("fringes subcommand fits CSV scans") {
  const auto dir = fresh_dir("fringes");
  const double k = 16105755.291453758;
  for (auto [name, s] : {std::pair{"a.csv", 1.4386}, std::pair{"b.csv", 0.7767}}) {
    std::ofstream f(dir / name);
    f << "alpha,p\n";
    for (int i = 0; i < 81; ++i) {
      const double x = 3.8126 + 12.0 * i / 80;
      f << x * k << ',' << 0.5 + 0.49 * std::sin(s * (9.812637 - x)) << '\n';
    }
  }
  const auto r = run_cli({"--output-dir", dir.string(), "fringes", "--in", "a.csv", "b.csv", "--crossing-out", "x.csv"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("source,offset,amplitude", 0) == 0);
  const auto crossing = slurp(dir / "x.csv");
  const auto line = crossing.substr(crossing.find('\n') + 1);
  const double accel = std::stod(line.substr(line.rfind(',') + 1));
  CHECK(std::abs(accel - 9.812637) < 1e-6);
}

TEST_CASE("reproduce twice gives byte-identical outputs") {
  const auto one = fresh_dir("rep1");
  const auto two = fresh_dir("rep2");
  REQUIRE(run_cli({"--output-dir", one.string(), "reproduce", "--pairs", "400", "--seed", "7"}).code == kExitOk);
  REQUIRE(run_cli({"--output-dir", two.string(), "reproduce", "--pairs", "400", "--seed", "7", "--threads", "3"}).code == kExitOk);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(one)) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;  // carries wall-clock timestamps
    CHECK(slurp(entry.path()) == slurp(two / name));
    ++compared;
  }
  CHECK(compared == 10);
  const auto summary = slurp(one / "summary.csv");
  CHECK(summary.rfind("quantity,simulated,reference,note\n", 0) == 0);
  CHECK(summary.find("xi_m2_squeezed_db,") != std::string::npos);
}
