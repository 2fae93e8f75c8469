// Copyright 2026 The zrplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "zrp/harness.hpp"

using zrp::ConfigError;
using zrp::ExperimentConfig;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return zrp::parse_config(is);
}

const char* kHydro = R"([model]
N = 32
theta = 2
kappa = 1
alpha = 1
beta = 1
lambda = 1
delta = 1
rate = linear

[experiment]
kind = hydro
initial = constant:0.5
N_list = 16, 32
replicas = 8
checkpoints = 0, 0.01
seed = 5
)";

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("zrp_harness_" + name);
  std::filesystem::remove_all(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse(kHydro);
  CHECK(cfg.kind == zrp::ExperimentKind::hydro);
  CHECK(cfg.params.n == 32);
  CHECK(cfg.params.theta == 2.0);
  CHECK(cfg.params.rate->family() == zrp::RateFamily::linear);
  CHECK(cfg.n_list == std::vector<int>{16, 32});
  CHECK(cfg.checkpoints == std::vector<double>{0.0, 0.01});
  CHECK(cfg.initial.kind == zrp::ProfileSpec::Kind::constant);
  CHECK(cfg.initial.a == 0.5);
  CHECK(cfg.seed == 5);
  CHECK(cfg.entries.at("model.N") == "32");
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.bandwidth_for(16) == doctest::Approx(1.0));
  CHECK(cfg.bandwidth_for(256) == doctest::Approx(0.5));
}

TEST_CASE("inline comments") {
  const auto cfg = parse("[model]\nN = 12   # sites\ntheta = 2 ; slow\n[output]\ndir = out/run#3\n");
  CHECK(cfg.params.n == 12);
  CHECK(cfg.params.theta == 2.0);
  CHECK(cfg.out_dir == "out/run#3");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("[model]\nN = 10\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nN = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\ntheta = 1.5x\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nrate = quadratic\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nkind = sprint\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\ninitial = linear:1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nseed = -3\n"), ConfigError);
  // too few replicas and an initial profile above the stationary one
  auto cfg = parse(kHydro);
  cfg.replicas = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = parse(std::string(kHydro) + "[pde]\ncells = 64\n");
  cfg.initial = zrp::ProfileSpec::parse("constant:1.5");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  // stationary-state condition
  auto bad = parse("[model]\nN = 10\nalpha = 2\nbeta = 0.5\nlambda = 1\ndelta = 1\nrate = indicator\n"
                   "[experiment]\nkind = stationarity\n");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config hash") {
  const auto a = parse(kHydro);
  const auto b = parse(kHydro);
  CHECK(zrp::config_hash(a) == zrp::config_hash(b));
  const auto c = parse(std::string(kHydro) + "bandwidth = 0.3\n");
  CHECK(zrp::config_hash(a) != zrp::config_hash(c));
}

TEST_CASE("profile specs") {
  const zrp::ThermoTable poi(zrp::share(zrp::JumpRate::linear()));
  zrp::ModelParams p;
  p.n = 10;
  p.alpha = 2;
  p.beta = 1;
  p.lambda = 1;
  p.delta = 1;
  p.rate = poi.rate_ptr();
  const auto lin = zrp::ProfileSpec::parse("linear:1:3");
  CHECK(lin.density(p, poi)(0.5) == doctest::Approx(2.0));
  const auto cosine = zrp::ProfileSpec::parse("cosine:1:0.5");
  CHECK(cosine.density(p, poi)(0.0) == doctest::Approx(1.5));
  const auto st = zrp::ProfileSpec::parse("stationary");
  CHECK(st.density(p, poi)(0.0) == doctest::Approx(5.0 / 3.0));
  CHECK(zrp::ProfileSpec::parse("ness").fugacity(p, poi).values == zrp::ness_fugacity(p).values);
  CHECK(zrp::ProfileSpec::parse("empty").fugacity(p, poi).max() == 0.0);
  CHECK_THROWS_AS(zrp::ProfileSpec::parse("ness").density(p, poi), ConfigError);
}

TEST_CASE("box smoothing") {
  const std::vector<double> flat(31, 2.5);
  for (double v : zrp::box_smooth(flat, 32, 0.1)) CHECK(v == doctest::Approx(2.5));
  // half-width floor(0.1 * 32) = 3: interior windows hold 7 sites
  std::vector<double> ramp(31);
  for (int i = 0; i < 31; ++i) ramp[static_cast<std::size_t>(i)] = i + 1;
  const auto s = zrp::box_smooth(ramp, 32, 0.1);
  CHECK(s[15] == doctest::Approx(16.0));
  CHECK(s[0] == doctest::Approx((1 + 2 + 3 + 4) / 4.0));
  // narrow bandwidths still average over one neighbour each side
  const auto t = zrp::box_smooth(ramp, 32, 1e-6);
  CHECK(t[10] == doctest::Approx(11.0));
  CHECK(t[0] == doctest::Approx(1.5));
}

TEST_CASE("stationary start: error stays at the noise floor") {
  auto cfg = parse(kHydro);
  cfg.initial = zrp::ProfileSpec::parse("ness");
  cfg.n_list = {32};
  cfg.replicas = 40;
  cfg.checkpoints = {0.0, 0.02};
  const auto r = zrp::hydro_compare(cfg, 1);
  REQUIRE(r.errors.size() == 2);
  const auto& e0 = r.errors[0];
  const auto& e1 = r.errors[1];
  CHECK(e0.se > 0.0);
  CHECK(std::abs(e1.err - e0.err) < 4.0 * std::sqrt(e0.se * e0.se + e1.se * e1.se));
  CHECK(r.profiles.size() == 2 * 31);
}

TEST_CASE("stationarity probe") {
  auto cfg = parse("[model]\nN = 8\ntheta = 1\nkappa = 1\nalpha = 2\nbeta = 1\nlambda = 1\ndelta = 1\n"
                   "rate = power:gamma=0.5\n[experiment]\nkind = stationarity\nsamples = 20000\n"
                   "kappa_list = 1, 4\nseed = 3\n");
  const auto r = zrp::stationarity_probe(cfg, 1);
  CHECK(r.rows.size() == 2 * 12);
  CHECK(r.max_ratio.at(1.0) < 4.0);
  CHECK(r.max_ratio.at(4.0) > 4.0);
  const auto again = zrp::stationarity_probe(cfg, 3);
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].estimate == again.rows[i].estimate);
}

TEST_CASE("probe functions sit where they should") {
  zrp::ModelParams p;
  p.n = 10;
  p.rate = zrp::share(zrp::JumpRate::linear());
  const auto fs = zrp::probe_functions(p);
  REQUIRE(fs.size() == 12);
  CHECK(fs[0].support == std::vector<int>{1});
  CHECK(fs[4].support == std::vector<int>{5});
  CHECK(fs[11].support == std::vector<int>{8, 9});
  // the generator kills constants
  zrp::Configuration c(10, {1, 0, 2, 3, 1, 0, 0, 4, 1});
  const zrp::CylinderFunction one{"one", {1, 9}, [](const zrp::Configuration&) { return 1.0; }};
  p.alpha = p.beta = p.lambda = p.delta = 1.0;
  CHECK(zrp::apply_generator(p, c, one) == 0.0);
}

TEST_CASE("thermo table rows") {
  auto cfg = parse("[model]\nrate = indicator\n[experiment]\nkind = thermo-table\n[thermo]\nrho_max = 4\npoints = 9\n");
  const auto rows = zrp::thermo_table(cfg);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(r.phi == doctest::Approx(r.rho / (1.0 + r.rho)).epsilon(1e-9));
    CHECK(std::abs(r.round_trip) < 1e-8);
  }
}

TEST_CASE("run_experiment writes outputs and a manifest") {
  auto cfg = parse("[model]\nN = 10\ntheta = 1\nalpha = 2\nbeta = 1\nlambda = 1\ndelta = 1\nrate = linear\n"
                   "[experiment]\nkind = pde\ninitial = cosine:1:0.5\nseed = 2\n[pde]\ncells = 32\nt_end = 0.05\n");
  cfg.out_dir = scratch_dir("pde");
  const auto res = zrp::run_experiment(cfg, 1, true);
  CHECK(res.outputs.size() >= 3);
  for (const auto& p : res.outputs) CHECK(std::filesystem::exists(p));
  const auto manifest = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
  CHECK(manifest["kind"] == "pde");
  CHECK(manifest["seed"] == 2);
  CHECK(manifest["version"] == zrp::kVersion);
  CHECK(manifest["config"]["pde.cells"] == "32");
  CHECK(manifest["outputs"].size() + 1 == res.outputs.size());  // not itself
  const auto first = slurp(cfg.out_dir / "pde_trajectory.csv");
  CHECK(first.rfind("t,u,rho\n", 0) == 0);
  zrp::run_experiment(cfg, 1, false);
  CHECK(slurp(cfg.out_dir / "pde_trajectory.csv") == first);
  std::filesystem::remove_all(cfg.out_dir);
}
