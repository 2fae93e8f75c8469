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

#include "zrp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "zrp/csv.hpp"

namespace zrp {

FluxInterpolant::FluxInterpolant(const ThermoTable& thermo, double rho_max) : thermo_(&thermo), rho_max_(rho_max) {
  if (!(rho_max > 0.0) || !std::isfinite(rho_max)) throw PdeError("flux grid needs a positive finite range");
  const auto nodes = static_cast<std::size_t>(std::ceil(rho_max / kSpacing)) + 2;
  values_.resize(nodes);
  for (std::size_t k = 0; k < nodes; ++k) values_[k] = thermo.flux(static_cast<double>(k) * kSpacing, kTol);
  rho_max_ = static_cast<double>(nodes - 1) * kSpacing;
}

double FluxInterpolant::operator()(double rho) const {
  if (rho <= 0.0) return 0.0;
  const double x = rho / kSpacing;
  const auto k = static_cast<std::size_t>(x);
  if (k + 1 >= values_.size()) return thermo_->flux(rho, kTol);
  const double w = x - static_cast<double>(k);
  return values_[k] + w * (values_[k + 1] - values_[k]);
}

double FluxInterpolant::derivative(double rho) const {
  const double x = std::max(rho, 0.0) / kSpacing;
  const auto k = static_cast<std::size_t>(x);
  if (k + 1 >= values_.size()) {
    const double step = kSpacing;
    return (thermo_->flux(rho + step, kTol) - thermo_->flux(rho, kTol)) / step;
  }
  return (values_[k + 1] - values_[k]) / kSpacing;
}

double DensityField::mass() const {
  double acc = 0.0;
  for (double r : rho) acc += r;
  return acc * h();
}

double kappa_tilde(const ModelParams& p) { return p.theta == 1.0 ? p.kappa : 0.0; }

namespace {

void check_params(const ModelParams& p) {
  if (!(p.theta >= 1.0)) throw PdeError("theta must be >= 1");
  if (!(p.kappa > 0.0)) throw PdeError("kappa must be positive");
  for (double r : {p.alpha, p.beta, p.lambda, p.delta})
    if (!(r >= 0.0) || !std::isfinite(r)) throw PdeError("reservoir rates must be finite and non-negative");
  if (!p.rate) throw PdeError("missing jump rate");
}

double boundary_factor(const ModelParams& p, double h) {
  const double k = kappa_tilde(p) * h * std::max(p.lambda, p.delta);
  // Diagonal weight of an end cell relative to g* dt / h².
  return std::max(2.0, 1.0 + k / (1.0 + 0.5 * k));
}

}  // namespace

double max_stable_dt(const ModelParams& p, double g_star, int cells) {
  const double h = 1.0 / cells;
  return h * h / (g_star * boundary_factor(p, h));
}

double default_dt(const ModelParams& p, double g_star, int cells) {
  const double h = 1.0 / cells;
  return 0.4 * h * h / (g_star * (1.0 + h * kappa_tilde(p) * std::max(p.lambda, p.delta)));
}

Traces boundary_traces(const ModelParams& p, double f_first, double f_last, double h) {
  const double k = kappa_tilde(p);
  return {(f_first + 0.5 * h * k * p.alpha) / (1.0 + 0.5 * h * k * p.lambda),
          (f_last + 0.5 * h * k * p.beta) / (1.0 + 0.5 * h * k * p.delta)};
}

namespace {

// Face fluxes J of the end faces; interior faces are (F_i - F_{i-1}) / h.
struct EndFluxes {
  double left;
  double right;
};

EndFluxes end_fluxes(const ModelParams& p, double f_first, double f_last, double h) {
  const double k = kappa_tilde(p);
  const Traces tr = boundary_traces(p, f_first, f_last, h);
  return {k * (p.lambda * tr.left - p.alpha), k * (p.beta - p.delta * tr.right)};
}

inline double cell_update(const std::vector<double>& f, std::size_t i, std::size_t m, double inv_h, EndFluxes ends) {
  const double jl = i == 0 ? ends.left : (f[i] - f[i - 1]) * inv_h;
  const double jr = i + 1 == m ? ends.right : (f[i + 1] - f[i]) * inv_h;
  return (jr - jl) * inv_h;
}

void check_nonnegative(const std::vector<double>& rho) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] < 0.0)
      throw PdeError("negative density " + std::to_string(rho[i]) + " in cell " + std::to_string(i) +
                     "; the scheme should preserve non-negativity");
}

}  // namespace

void explicit_step_serial(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho,
                          std::vector<double>& f, double dt) {
  const std::size_t m = rho.size();
  const double inv_h = static_cast<double>(m);
  f.resize(m);
  for (std::size_t i = 0; i < m; ++i) f[i] = flux(rho[i]);
  const EndFluxes ends = end_fluxes(p, f.front(), f.back(), 1.0 / inv_h);
  for (std::size_t i = 0; i < m; ++i) rho[i] += dt * cell_update(f, i, m, inv_h, ends);
}

void explicit_step_parallel(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho,
                            std::vector<double>& f, double dt) {
  const std::size_t m = rho.size();
  const double inv_h = static_cast<double>(m);
  f.resize(m);
  const auto n = static_cast<long long>(m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = flux(rho[static_cast<std::size_t>(i)]);
  const EndFluxes ends = end_fluxes(p, f.front(), f.back(), 1.0 / inv_h);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i)
    rho[static_cast<std::size_t>(i)] += dt * cell_update(f, static_cast<std::size_t>(i), m, inv_h, ends);
}

void semi_implicit_step(const ModelParams& p, const FluxInterpolant& flux, std::vector<double>& rho, double dt) {
  const std::size_t m = rho.size();
  const double inv_h = static_cast<double>(m);
  const double h = 1.0 / inv_h;
  const double k = kappa_tilde(p);
  std::vector<double> f(m);
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) {
    f[i] = flux(rho[i]);
    s[i] = flux.derivative(rho[i]);
  }
  const EndFluxes ends = end_fluxes(p, f.front(), f.back(), h);

  // Linear part A of F -> (J_{i+1} - J_i)/h; the end faces contribute
  // through the traces, whose slope in the end-cell value is c.
  const double c_left = 1.0 / (1.0 + 0.5 * h * k * p.lambda);
  const double c_right = 1.0 / (1.0 + 0.5 * h * k * p.delta);
  std::vector<double> lower(m, 0.0);
  std::vector<double> diag(m, 0.0);
  std::vector<double> upper(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double a_ii = 0.0;
    if (i > 0) {
      lower[i] = inv_h * inv_h;
      a_ii -= inv_h * inv_h;
    } else {
      a_ii -= k * p.lambda * c_left * inv_h;
    }
    if (i + 1 < m) {
      upper[i] = inv_h * inv_h;
      a_ii -= inv_h * inv_h;
    } else {
      a_ii -= k * p.delta * c_right * inv_h;
    }
    diag[i] = a_ii;
  }
  // (I - dt A S) δ = dt (A F + b); the right side is the explicit update.
  std::vector<double> rhs(m);
  std::vector<double> tl(m), td(m), tu(m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = dt * cell_update(f, i, m, inv_h, ends);
    td[i] = 1.0 - dt * diag[i] * s[i];
    tl[i] = i > 0 ? -dt * lower[i] * s[i - 1] : 0.0;
    tu[i] = i + 1 < m ? -dt * upper[i] * s[i + 1] : 0.0;
  }
  // Thomas algorithm.
  for (std::size_t i = 1; i < m; ++i) {
    const double w = tl[i] / td[i - 1];
    td[i] -= w * tu[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[m - 1] /= td[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] = (rhs[i] - tu[i] * rhs[i + 1]) / td[i];
  for (std::size_t i = 0; i < m; ++i) rho[i] += rhs[i];
}

namespace {

double density_bound(const ModelParams& p, const ThermoTable& thermo, const std::vector<double>& rho0) {
  double top = *std::max_element(rho0.begin(), rho0.end());
  if (kappa_tilde(p) > 0.0) {
    for (auto [in, out] : {std::pair{p.alpha, p.lambda}, std::pair{p.beta, p.delta}}) {
      if (out <= 0.0) continue;
      const double ratio = in / out;
      if (ratio < thermo.phi_star()) top = std::max(top, thermo.mean_density(ratio));
    }
  }
  return 1.05 * top + 0.01;
}

}  // namespace

Trajectory solve(const ModelParams& p, const ThermoTable& thermo, const std::function<double(double)>& gamma,
                 const PdeOptions& opt) {
  check_params(p);
  if (opt.cells < 2) throw PdeError("at least two cells are required");
  if (!(opt.t_end >= 0.0)) throw PdeError("t_end must be non-negative");
  const double g_star = thermo.rate().g_star();
  if (!(g_star > 0.0)) throw PdeError("flux Lipschitz bound must be positive");

  Trajectory traj;
  traj.params = p;
  traj.kappa_tilde = kappa_tilde(p);

  DensityField field;
  field.rho.resize(static_cast<std::size_t>(opt.cells));
  for (int i = 0; i < opt.cells; ++i) {
    const double v = gamma(field.center(i));
    if (!(v >= 0.0) || !std::isfinite(v)) throw PdeError("initial profile must be finite and non-negative");
    field.rho[static_cast<std::size_t>(i)] = v;
  }
  traj.flux = std::make_shared<FluxInterpolant>(thermo, density_bound(p, thermo, field.rho));
  const FluxInterpolant& flux = *traj.flux;

  double dt = opt.dt;
  if (dt > 0.0) {
    if (!opt.semi_implicit && dt > max_stable_dt(p, g_star, opt.cells))
      throw CflViolation("time step " + std::to_string(dt) + " exceeds the stability limit " +
                         std::to_string(max_stable_dt(p, g_star, opt.cells)));
  } else {
    dt = default_dt(p, g_star, opt.cells);
    if (opt.semi_implicit) dt *= 5.0;
  }
  const auto steps = opt.t_end > 0.0 ? static_cast<std::size_t>(std::ceil(opt.t_end / dt)) : std::size_t{0};
  if (steps > 0) dt = opt.t_end / static_cast<double>(steps);
  traj.dt = dt;
  traj.steps = steps;
  const std::size_t stride =
      opt.frame_interval > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.frame_interval / dt)))
                               : 1;

  const double h = field.h();
  const auto store = [&](double t) {
    field.t = t;
    traj.frames.push_back(field);
    const Traces tr = boundary_traces(p, flux(field.rho.front()), flux(field.rho.back()), h);
    traj.left_trace.push_back(tr.left);
    traj.right_trace.push_back(tr.right);
  };
  store(0.0);
  std::vector<double> scratch;
  for (std::size_t n = 1; n <= steps; ++n) {
    if (opt.semi_implicit) {
      semi_implicit_step(p, flux, field.rho, dt);
    } else if (opt.parallel) {
      explicit_step_parallel(p, flux, field.rho, scratch, dt);
    } else {
      explicit_step_serial(p, flux, field.rho, scratch, dt);
    }
    check_nonnegative(field.rho);
    if (n % stride == 0 || n == steps) store(n == steps ? opt.t_end : static_cast<double>(n) * dt);
  }
  return traj;
}

std::pair<double, double> stationary_flux_line(const ModelParams& p) {
  check_params(p);
  if (p.theta > 1.0) {
    if (!(p.lambda + p.delta > 0.0)) throw PdeError("stationary profile needs lambda + delta > 0");
    return {0.0, (p.alpha + p.beta) / (p.lambda + p.delta)};
  }
  // a - κλ b = -κα ; (1 + κδ) a + κδ b = κβ
  const double k = p.kappa;
  const double m11 = 1.0;
  const double m12 = -k * p.lambda;
  const double m21 = 1.0 + k * p.delta;
  const double m22 = k * p.delta;
  const double det = m11 * m22 - m12 * m21;
  if (std::abs(det) < 1e-300) throw PdeError("singular boundary system for the stationary profile");
  const double r1 = -k * p.alpha;
  const double r2 = k * p.beta;
  return {(r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det};
}

StationaryProfile stationary(const ModelParams& p, const ThermoTable& thermo, int cells) {
  if (cells < 1) throw PdeError("cells must be positive");
  const auto [a, b] = stationary_flux_line(p);
  StationaryProfile out{a, b, {}};
  out.field.rho.resize(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    const double phi = a * out.field.center(i) + b;
    if (phi < 0.0 || phi >= thermo.phi_star())
      throw PdeError("stationary fugacity " + std::to_string(phi) + " outside the range of the density map");
    out.field.rho[static_cast<std::size_t>(i)] = thermo.mean_density(phi);
  }
  return out;
}

double weak_residual(const Trajectory& traj, const TestFunction& g, double t) {
  if (traj.frames.empty()) throw PdeError("empty trajectory");
  const auto& p = traj.params;
  const double k = traj.kappa_tilde;
  const FluxInterpolant& flux = *traj.flux;
  std::size_t last = 0;
  while (last + 1 < traj.frames.size() && traj.frames[last + 1].t <= t + 1e-12) ++last;

  const auto pairing = [&](const DensityField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.cells(); ++i) acc += f.rho[static_cast<std::size_t>(i)] * g.value(f.t, f.center(i));
    return acc * f.h();
  };
  const auto integrand = [&](std::size_t idx) {
    const DensityField& f = traj.frames[idx];
    const double s = f.t;
    double acc = 0.0;
    for (int i = 0; i < f.cells(); ++i) {
      const double u = f.center(i);
      const double r = f.rho[static_cast<std::size_t>(i)];
      acc += r * g.dt(s, u) + flux(r) * g.duu(s, u);
    }
    acc *= f.h();
    const double fl = traj.left_trace[idx];
    const double fr = traj.right_trace[idx];
    acc -= fr * g.du(s, 1.0) - fl * g.du(s, 0.0);
    acc += k * ((p.beta - p.delta * fr) * g.value(s, 1.0) - (p.lambda * fl - p.alpha) * g.value(s, 0.0));
    return acc;
  };

  double integral = 0.0;
  double prev = integrand(0);
  for (std::size_t i = 1; i <= last; ++i) {
    const double cur = integrand(i);
    integral += 0.5 * (traj.frames[i].t - traj.frames[i - 1].t) * (prev + cur);
    prev = cur;
  }
  return std::abs(pairing(traj.frames[last]) - pairing(traj.frames[0]) - integral);
}

double l1_distance(const DensityField& a, const DensityField& b) {
  if (a.rho.size() != b.rho.size()) throw PdeError("fields live on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rho.size(); ++i) acc += std::abs(a.rho[i] - b.rho[i]);
  return acc * a.h();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  CsvWriter csv(os, {"t", "u", "rho"});
  for (const auto& f : traj.frames)
    for (int i = 0; i < f.cells(); ++i) csv.row(f.t, f.center(i), f.rho[static_cast<std::size_t>(i)]);
}

void write_stationary_csv(std::ostream& os, const StationaryProfile& s) {
  CsvWriter csv(os, {"u", "phi", "rho"});
  for (int i = 0; i < s.field.cells(); ++i) {
    const double u = s.field.center(i);
    csv.row(u, s.flux_at(u), s.field.rho[static_cast<std::size_t>(i)]);
  }
}

}  // namespace zrp
