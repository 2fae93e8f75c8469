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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "zrp/csv.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/harness.hpp"

namespace zrp {

void write_hydro_csv(std::ostream& os, const HydroReport& r) {
  CsvWriter csv(os, {"N", "t", "err", "se", "mean_profile_err", "mean_profile_se"});
  for (const auto& e : r.errors) csv.row(e.n, e.t, e.err, e.se, e.mean_profile_err, e.mean_profile_se);
}

void write_hydro_profiles_csv(std::ostream& os, const HydroReport& r) {
  CsvWriter csv(os, {"N", "t", "u", "rho_hat", "rho_pde"});
  for (const auto& p : r.profiles) csv.row(p.n, p.t, p.u, p.rho_hat, p.rho_pde);
}

void write_hydrostatic_csv(std::ostream& os, const HydrostaticReport& r) {
  CsvWriter csv(os, {"N", "x", "u", "mean", "se", "ness_density", "asymptotic_density", "z"});
  for (const auto& s : r.sites) csv.row(s.n, s.x, s.u, s.mean, s.se, s.ness_density, s.asymptotic_density, s.z);
}

void write_hydrostatic_summary_csv(std::ostream& os, const HydrostaticReport& r) {
  CsvWriter csv(os, {"N", "sup_ness", "l1_ness", "sup_asymptotic", "l1_asymptotic", "max_abs_z"});
  for (const auto& s : r.summary)
    csv.row(s.n, s.sup_ness, s.l1_ness, s.sup_asymptotic, s.l1_asymptotic, s.max_abs_z);
}

void write_concentration_csv(std::ostream& os, const HydrostaticReport& r) {
  CsvWriter csv(os, {"N", "variance", "se"});
  for (const auto& c : r.concentration) csv.row(c.n, c.variance, c.se);
}

void write_probe_csv(std::ostream& os, const ProbeReport& r) {
  CsvWriter csv(os, {"kappa", "function", "x", "estimate", "se", "ratio"});
  for (const auto& row : r.rows) csv.row(row.kappa, row.function, row.x, row.estimate, row.se, row.ratio);
}

void write_coupled_gap_csv(std::ostream& os, const SpectralReport& r) {
  CsvWriter csv(os, {"rate", "ell", "j", "coupled_gap", "box_min", "bridge", "exit_rate", "bound", "heuristic",
                     "heuristic_bound", "variance_defect"});
  for (const auto& c : r.coupled)
    csv.row(c.rate, c.ell, c.particles, c.bound.coupled_gap, c.bound.box_min, c.bound.bridge, c.bound.exit_rate,
            c.bound.bound(), c.bound.heuristic, c.bound.heuristic_bound(), c.variance_defect);
}

void write_thermo_csv(std::ostream& os, const std::vector<ThermoRow>& rows) {
  CsvWriter csv(os, {"rho", "phi", "Z", "variance", "round_trip"});
  for (const auto& r : rows) csv.row(r.rho, r.phi, r.z, r.variance, r.round_trip);
}

void write_svg_plot(std::ostream& os, const std::string& title, const std::vector<PlotSeries>& series) {
  constexpr double kW = 640.0;
  constexpr double kH = 400.0;
  constexpr double kPad = 48.0;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double v) { return kPad + (v - x0) / (x1 - x0) * (kW - 2 * kPad); };
  const auto py = [&](double v) { return kH - kPad - (v - y0) / (y1 - y0) * (kH - 2 * kPad); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\"" << kH - 2 * kPad
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 16 << "\" font-size=\"10\">" << format_number(x0)
     << "</text>\n";
  os << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 16 << "\" font-size=\"10\" text-anchor=\"end\">"
     << format_number(x1) << "</text>\n";
  os << "<text x=\"" << kPad - 4 << "\" y=\"" << kH - kPad << "\" font-size=\"10\" text-anchor=\"end\">"
     << format_number(y0) << "</text>\n";
  os << "<text x=\"" << kPad - 4 << "\" y=\"" << kPad + 8 << "\" font-size=\"10\" text-anchor=\"end\">"
     << format_number(y1) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = colors[i % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
      if (std::isfinite(s.y[k])) os << format_number(px(s.x[k])) << ',' << format_number(py(s.y[k])) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << kW - kPad - 4 << "\" y=\"" << kPad + 14 + 14 * static_cast<double>(i)
       << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg, int workers,
                    double wall_seconds, const std::vector<std::filesystem::path>& outputs) {
  nlohmann::ordered_json j;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  j["tool"] = "zrplab";
  j["version"] = kVersion;
  j["kind"] = kind_name(cfg.kind);
  j["config_hash"] = hash.str();
  j["seed"] = cfg.seed;
  j["workers"] = workers;
  j["wall_time_seconds"] = wall_seconds;
  j["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                                  "." + std::to_string(BOOST_VERSION % 100)},
                    {"compiler", __VERSION__}};
  nlohmann::ordered_json config;
  for (const auto& [k, v] : cfg.entries) config[k] = v;
  j["config"] = config;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& o : outputs) files.push_back(o.filename().string());
  j["outputs"] = files;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  template <class F>
  void write(const std::string& name, F&& body) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    body(os);
    paths_.push_back(path);
  }
  const std::vector<std::filesystem::path>& paths() const { return paths_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> paths_;
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, int workers, bool plot) {
  const auto started = std::chrono::steady_clock::now();
  if (workers <= 0) workers = default_workers();
  OutputSet out(cfg.out_dir);
  switch (cfg.kind) {
    case ExperimentKind::hydro: {
      const auto r = hydro_compare(cfg, workers);
      out.write("hydro_errors.csv", [&](std::ostream& os) { write_hydro_csv(os, r); });
      out.write("hydro_profiles.csv", [&](std::ostream& os) { write_hydro_profiles_csv(os, r); });
      if (plot) {
        std::vector<PlotSeries> series;
        const double t_last = r.profiles.empty() ? 0.0 : r.profiles.back().t;
        std::map<int, PlotSeries> by_n;
        PlotSeries pde{"PDE", {}, {}};
        const int n_last = r.profiles.empty() ? 0 : r.profiles.back().n;
        for (const auto& p : r.profiles) {
          if (p.t != t_last) continue;
          auto& s = by_n[p.n];
          s.label = "N=" + std::to_string(p.n);
          s.x.push_back(p.u);
          s.y.push_back(p.rho_hat);
          if (p.n == n_last) {
            pde.x.push_back(p.u);
            pde.y.push_back(p.rho_pde);
          }
        }
        for (auto& [n, s] : by_n) series.push_back(std::move(s));
        series.push_back(std::move(pde));
        out.write("hydro_profiles.svg", [&](std::ostream& os) {
          write_svg_plot(os, "smoothed density at t = " + format_number(t_last), series);
        });
      }
      break;
    }
    case ExperimentKind::hydrostatic: {
      const auto r = hydrostatic(cfg, workers);
      out.write("hydrostatic_sites.csv", [&](std::ostream& os) { write_hydrostatic_csv(os, r); });
      out.write("hydrostatic_summary.csv", [&](std::ostream& os) { write_hydrostatic_summary_csv(os, r); });
      out.write("concentration.csv", [&](std::ostream& os) { write_concentration_csv(os, r); });
      if (plot) {
        std::vector<PlotSeries> series;
        std::map<int, std::array<PlotSeries, 2>> by_n;
        for (const auto& s : r.sites) {
          auto& [sim, ness] = by_n[s.n];
          sim.label = "time average N=" + std::to_string(s.n);
          ness.label = "stationary N=" + std::to_string(s.n);
          sim.x.push_back(s.u);
          sim.y.push_back(s.mean);
          ness.x.push_back(s.u);
          ness.y.push_back(s.ness_density);
        }
        for (auto& [n, pair] : by_n) {
          series.push_back(std::move(pair[0]));
          series.push_back(std::move(pair[1]));
        }
        out.write("hydrostatic_profile.svg",
                  [&](std::ostream& os) { write_svg_plot(os, "time-averaged density", series); });
      }
      break;
    }
    case ExperimentKind::stationarity: {
      const auto r = stationarity_probe(cfg, workers);
      out.write("stationarity.csv", [&](std::ostream& os) { write_probe_csv(os, r); });
      break;
    }
    case ExperimentKind::spectral_scan: {
      const auto r = spectral_scan(cfg, workers);
      out.write("gaps.csv", [&](std::ostream& os) { write_gap_csv(os, r.gaps); });
      out.write("coupled_gaps.csv", [&](std::ostream& os) { write_coupled_gap_csv(os, r); });
      break;
    }
    case ExperimentKind::coupling: {
      cfg.validate();
      const ThermoTable thermo(cfg.params.rate);
      const FugacityProfile mu = cfg.initial.fugacity(cfg.params, thermo);
      const auto r = domination_experiment(mu, cfg.params, thermo, cfg.checkpoints, cfg.replicas, cfg.seed, cfg.block,
                                           workers);
      out.write("domination.csv", [&](std::ostream& os) { write_domination_csv(os, r); });
      out.write("domination_summary.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"t", "mean_gap", "se_gap", "worst_excess"});
        for (const auto& s : r.summary) csv.row(s.t, s.mean_gap, s.se_gap, s.worst_excess);
      });
      break;
    }
    case ExperimentKind::pde: {
      cfg.validate();
      const ThermoTable thermo(cfg.params.rate);
      PdeOptions opt;
      opt.cells = cfg.cells;
      opt.t_end = cfg.t_end;
      opt.frame_interval = cfg.t_end / 20.0;
      opt.parallel = cfg.cells >= (1 << 14);
      const Trajectory traj = solve(cfg.params, thermo, cfg.initial.density(cfg.params, thermo), opt);
      const StationaryProfile st = stationary(cfg.params, thermo, cfg.cells);
      out.write("pde_trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
      out.write("pde_stationary.csv", [&](std::ostream& os) { write_stationary_csv(os, st); });
      if (plot) {
        std::vector<PlotSeries> series;
        for (std::size_t k = 0; k < traj.frames.size(); k += std::max<std::size_t>(1, traj.frames.size() / 4)) {
          const auto& f = traj.frames[k];
          PlotSeries s{"t=" + format_number(f.t), {}, {}};
          for (int i = 0; i < f.cells(); ++i) {
            s.x.push_back(f.center(i));
            s.y.push_back(f.rho[static_cast<std::size_t>(i)]);
          }
          series.push_back(std::move(s));
        }
        PlotSeries s{"stationary", {}, {}};
        for (int i = 0; i < st.field.cells(); ++i) {
          s.x.push_back(st.field.center(i));
          s.y.push_back(st.field.rho[static_cast<std::size_t>(i)]);
        }
        series.push_back(std::move(s));
        out.write("pde_profiles.svg", [&](std::ostream& os) { write_svg_plot(os, "density profiles", series); });
      }
      break;
    }
    case ExperimentKind::thermo_table: {
      const auto rows = thermo_table(cfg);
      out.write("thermo_table.csv", [&](std::ostream& os) { write_thermo_csv(os, rows); });
      break;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  RunResult result{out.paths()};
  const auto manifest = cfg.out_dir / "manifest.json";
  write_manifest(manifest, cfg, workers, wall, result.outputs);
  result.outputs.push_back(manifest);
  return result;
}

}  // namespace zrp
