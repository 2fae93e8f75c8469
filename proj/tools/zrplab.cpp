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

// zrplab: command-line front end for the experiments.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zrp/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"zrplab: numerical lab for the open zero-range process"};
  app.set_version_flag("--version", std::string(zrp::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 0;
  bool plot = false;

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"hydro", "compare the smoothed empirical density with the PDE solution"},
      {"hydrostatic", "time-average site densities and compare with the stationary profile"},
      {"stationarity", "Monte Carlo check of E[Lf] = 0 under the stationary product state"},
      {"spectral-scan", "spectral gaps of closed boxes and of the coupled two-box system"},
      {"couple", "coupled runs below the stationary state"},
      {"pde", "solve the hydrodynamic equation"},
      {"thermo-table", "tabulate fugacity, partition function and variance over a density grid"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override experiment.seed");
    sub->add_option("--out", out_dir, "override output.dir");
    sub->add_option("--workers", workers, "worker threads (default: all)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--plot", plot, "also write SVG plots");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const auto* sub = app.get_subcommands().front();
    zrp::ExperimentConfig cfg = zrp::load_config(config_path);
    const auto kind = zrp::parse_kind(sub->get_name());
    if (cfg.entries.count("experiment.kind") && cfg.entries["experiment.kind"] != zrp::kind_name(kind) &&
        zrp::parse_kind(cfg.entries["experiment.kind"]) != kind)
      throw zrp::ConfigError("config is for '" + cfg.entries["experiment.kind"] + "', not '" + sub->get_name() + "'");
    cfg.kind = kind;
    cfg.entries["experiment.kind"] = zrp::kind_name(kind);
    if (sub->count("--seed") > 0) {
      cfg.seed = seed;
      cfg.entries["experiment.seed"] = std::to_string(seed);
    }
    if (sub->count("--out") > 0) {
      cfg.out_dir = out_dir;
      cfg.entries["output.dir"] = out_dir;
    }
    const auto result = zrp::run_experiment(cfg, workers, plot);
    for (const auto& p : result.outputs) std::cout << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "zrplab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
