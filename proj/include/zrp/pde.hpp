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

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "zrp/measures.hpp"
#include "zrp/thermo.hpp"

namespace zrp {

class PdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflViolation : public PdeError {
 public:
  using PdeError::PdeError;
};

/// Φ tabulated on a uniform density grid and interpolated linearly.
/// Densities past the grid fall back to the thermodynamic root finder.
class FluxInterpolant {
 public:
  static constexpr double kSpacing = 1e-3;
  static constexpr double kTol = 1e-10;

  FluxInterpolant(const ThermoTable& thermo, double rho_max);

  double operator()(double rho) const;
  /// Slope of the interpolant at rho (right-sided on grid nodes).
  double derivative(double rho) const;
  double rho_max() const { return rho_max_; }
  const ThermoTable& thermo() const { return *thermo_; }

 private:
  const ThermoTable* thermo_;
  double rho_max_;
  std::vector<double> values_;
};

/// Cell-centred density on M uniform cells of [0, 1].
struct DensityField {
  double t = 0.0;
  std::vector<double> rho;

  int cells() const { return static_cast<int>(rho.size()); }
  double h() const { return 1.0 / static_cast<double>(rho.size()); }
  double center(int i) const { return (i + 0.5) * h(); }
  double mass() const;
};

struct PdeOptions {
  int cells = 128;
  double t_end = 1.0;
  /// Forced time step; 0 selects the stability rule.
  double dt = 0.0;
  bool semi_implicit = false;
  /// Time between stored frames; 0 stores every step.
  double frame_interval = 0.0;
  /// Use the OpenMP kernel for the explicit step.
  bool parallel = false;
};

struct Trajectory {
  ModelParams params;
  double kappa_tilde = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::shared_ptr<const FluxInterpolant> flux;
  std::vector<DensityField> frames;
  /// Boundary traces Φ(ρ(0)) and Φ(ρ(1)) at each frame.
  std::vector<double> left_trace;
  std::vector<double> right_trace;

  const DensityField& final() const { return frames.back(); }
};

/// κ̃ = κ for θ = 1, 0 otherwise.
double kappa_tilde(const ModelParams& p);

/// Largest time step for which the explicit scheme is monotone.
double max_stable_dt(const ModelParams& p, double g_star, int cells);
/// Default step 0.4 h² / (g* (1 + h κ̃ max(λ, δ))).
double default_dt(const ModelParams& p, double g_star, int cells);

/// Boundary traces of the flux variable given F in the end cells.
struct Traces {
  double left;
  double right;
};
Traces boundary_traces(const ModelParams& p, double f_first, double f_last, double h);

/// One explicit step in place. `f` is scratch of size M.
void explicit_step_serial(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho,
                          std::vector<double>& f, double dt);
void explicit_step_parallel(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho,
                            std::vector<double>& f, double dt);
/// One linearly implicit step in F (tridiagonal solve).
void semi_implicit_step(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho, double dt);

/// Solves ∂ₜρ = ΔΦ(ρ) from ρ(0,u) = γ(u) sampled at cell centres.
Trajectory solve(const ModelParams& p, const ThermoTable& thermo, const std::function<double(double)>& gamma,
                 const PdeOptions& opt);

/// Φ(ρ̄(u)) = a u + b.
struct StationaryProfile {
  double a;
  double b;
  DensityField field;

  double flux_at(double u) const { return a * u + b; }
};
std::pair<double, double> stationary_flux_line(const ModelParams& p);
StationaryProfile stationary(const ModelParams& p, const ThermoTable& thermo, int cells);

/// Smooth test function G(t, u) with its derivatives.
struct TestFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> du;
  std::function<double(double, double)> duu;
};

/// |left side of the weak formulation| at frame time t (the last frame with
/// time <= t), using midpoint quadrature in space and the trapezoid rule
/// over stored frames in time. Φ is the trajectory's interpolant.
double weak_residual(const Trajectory& traj, const TestFunction& g, double t);

/// L¹ distance (1/M) Σ |ρ_i - σ_i| between fields on the same grid.
double l1_distance(const DensityField& a, const DensityField& b);

/// CSV (t, u, rho) for every stored frame.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// CSV (u, phi, rho).
void write_stationary_csv(std::ostream& os, const StationaryProfile& s);

}  // namespace zrp
