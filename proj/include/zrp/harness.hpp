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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "zrp/coupling.hpp"
#include "zrp/measures.hpp"
#include "zrp/observables.hpp"
#include "zrp/pde.hpp"
#include "zrp/spectral.hpp"
#include "zrp/thermo.hpp"

namespace zrp {

inline constexpr const char* kVersion = "0.4.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { hydro, hydrostatic, stationarity, spectral_scan, coupling, pde, thermo_table };

ExperimentKind parse_kind(const std::string& s);
std::string kind_name(ExperimentKind k);

/// Initial condition as written in a config: a density profile γ on [0,1]
/// ("constant:c", "linear:a:b", "sine:base:amp", "cosine:base:amp",
/// "stationary"), the stationary product state ("ness") or "empty".
struct ProfileSpec {
  enum class Kind { constant, linear, sine, cosine, stationary, ness, empty };
  Kind kind = Kind::ness;
  double a = 0.0;
  double b = 0.0;
  std::string text = "ness";

  static ProfileSpec parse(const std::string& s);
  bool is_density() const { return kind != Kind::ness && kind != Kind::empty; }
  /// γ(u); for "stationary" the stationary PDE density.
  std::function<double(double)> density(const ModelParams& p, const ThermoTable& thermo) const;
  /// Site fugacities of the product measure this initial condition names.
  FugacityProfile fugacity(const ModelParams& p, const ThermoTable& thermo) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::hydro;
  ModelParams params;
  std::string rate_spec = "linear";
  ProfileSpec initial;
  std::vector<int> n_list;
  int replicas = 2;
  std::vector<double> checkpoints;
  std::uint64_t seed = 1;
  double bandwidth = 0.0;  // 0: 2 N^{-1/4}
  std::filesystem::path out_dir = "out";

  // stationarity
  std::uint64_t samples = 100'000;
  std::vector<double> kappa_list;
  // hydrostatic
  double burn_in = 0.0;
  double averaging_time = 1.0;
  // coupling
  int block = 2;
  // spectral-scan
  std::vector<std::string> spectral_rates;
  std::vector<int> ells;
  std::vector<int> particles;
  // pde
  int cells = 128;
  double t_end = 1.0;
  // thermo-table
  double rho_max = 5.0;
  int points = 101;

  /// Every key = value pair as read (after defaults), for hashing and the manifest.
  std::map<std::string, std::string> entries;

  double bandwidth_for(int n) const;
  /// Checks the invariants of the chosen kind. Throws ConfigError.
  void validate() const;
};

/// Reads an INI file ([model], [experiment], [spectral], [pde], [thermo],
/// [output]). Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& is);
/// FNV-1a 64 over the sorted entries.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- hydro

struct HydroRow {
  int n;
  double t;
  double err;  // replica mean of ∫|ρ̂ - ρ_PDE| du
  double se;
  double mean_profile_err;  // ∫|E ρ̂ - ρ_PDE| du
  double mean_profile_se;
};
struct ProfileRow {
  int n;
  double t;
  double u;
  double rho_hat;
  double rho_pde;
};
struct HydroReport {
  std::vector<HydroRow> errors;
  std::vector<ProfileRow> profiles;
};

/// Box-kernel smoothing of site values v[x-1], x = 1..N-1, half-width
/// max(1, floor(ε N)) sites, clipped to the bulk.
std::vector<double> box_smooth(std::span<const double> v, int n, double bandwidth);

HydroReport hydro_compare(const ExperimentConfig& cfg, int workers = 0);

// ---------------------------------------------------------- hydrostatic

struct HydrostaticSite {
  int n;
  int x;
  double u;
  double mean;
  double se;
  double ness_density;
  double asymptotic_density;
  double z;
};
struct HydrostaticSummary {
  int n;
  double sup_ness;
  double l1_ness;
  double sup_asymptotic;
  double l1_asymptotic;
  double max_abs_z;
};
struct ConcentrationRow {
  int n;
  double variance;
  double se;
};
struct HydrostaticReport {
  std::vector<HydrostaticSite> sites;
  std::vector<HydrostaticSummary> summary;
  std::vector<ConcentrationRow> concentration;
  double concentration_slope = 0.0;  // log-log slope of Var⟨π,H⟩ against N
};

HydrostaticReport hydrostatic(const ExperimentConfig& cfg, int workers = 0);

// --------------------------------------------------------- stationarity

struct ProbeRow {
  double kappa;
  std::string function;
  int x;
  double estimate;
  double se;
  double ratio;
};
struct ProbeReport {
  std::vector<ProbeRow> rows;
  std::map<double, double> max_ratio;  // per κ
};

/// The cylinder functions η(x), η(x)², g(η(x)), η(x)η(x+1) at x ∈ {1, N/2, N-1}
/// (the pair at N-2 on the right end).
std::vector<CylinderFunction> probe_functions(const ModelParams& p);

ProbeReport stationarity_probe(const ExperimentConfig& cfg, int workers = 0);

// ------------------------------------------------------------- spectral

struct CoupledRow {
  std::string rate;
  int ell;
  int particles;
  CoupledGapBound bound;
  double variance_defect;
};
struct SpectralReport {
  std::vector<GapScanRow> gaps;
  std::vector<CoupledRow> coupled;
};
SpectralReport spectral_scan(const ExperimentConfig& cfg, int workers = 0);

// ------------------------------------------------------- thermo table

struct ThermoRow {
  double rho;
  double phi;
  double z;
  double variance;
  double round_trip;
};
std::vector<ThermoRow> thermo_table(const ExperimentConfig& cfg);

// --------------------------------------------------------------- output

struct RunResult {
  std::vector<std::filesystem::path> outputs;
};

/// Runs the configured experiment, writes its CSV files (and SVG plots if
/// `plot`) under cfg.out_dir plus manifest.json.
RunResult run_experiment(const ExperimentConfig& cfg, int workers, bool plot);

void write_hydro_csv(std::ostream& os, const HydroReport& r);
void write_hydro_profiles_csv(std::ostream& os, const HydroReport& r);
void write_hydrostatic_csv(std::ostream& os, const HydrostaticReport& r);
void write_hydrostatic_summary_csv(std::ostream& os, const HydrostaticReport& r);
void write_concentration_csv(std::ostream& os, const HydrostaticReport& r);
void write_probe_csv(std::ostream& os, const ProbeReport& r);
void write_coupled_gap_csv(std::ostream& os, const SpectralReport& r);
void write_thermo_csv(std::ostream& os, const std::vector<ThermoRow>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
/// Minimal SVG line plot.
void write_svg_plot(std::ostream& os, const std::string& title, const std::vector<PlotSeries>& series);

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg, int workers,
                    double wall_seconds, const std::vector<std::filesystem::path>& outputs);

}  // namespace zrp
