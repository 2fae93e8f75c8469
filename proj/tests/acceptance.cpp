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


// Acceptance run: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed below; the hydrodynamic threshold is read from
// config/acceptance.json, where its pilot calibration is recorded.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "zrp/coupling.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/harness.hpp"
#include "zrp/observables.hpp"
#include "zrp/pde.hpp"
#include "zrp/random.hpp"
#include "zrp/simulator.hpp"
#include "zrp/spectral.hpp"
#include "zrp/stats.hpp"
#include "zrp/thermo.hpp"

namespace {

using zrp::JumpRate;
using zrp::ModelParams;
using zrp::ThermoTable;

// ---------------------------------------------------------------- limits

constexpr double kRoundTripTol = 1e-8;
constexpr double kLipschitzSlack = 2e-8;
constexpr double kRatioLimit = 4.0;
constexpr double kExactTol = 1e-10;
constexpr double kScaledGapFloor = 0.3;
constexpr double kStationaryL1 = 1e-4;
constexpr double kNeumannDrift = 1e-8;  // per unit time
constexpr double kRobinBalance = 1e-6;
constexpr double kResidualRatio = 1.8;
constexpr double kZLimit = 4.0;
constexpr double kMartingaleZ = 4.0;
constexpr double kVarianceRelZ = 5.0;

constexpr double kLimit1 = 5, kLimit2 = 5, kLimit3 = 120, kLimit4 = 300, kLimit5 = 180, kLimit6 = 60,
                 kLimit7 = 60, kLimit8 = 120, kLimit9 = 1200, kLimit10 = 600, kLimit11 = 600;

constexpr std::uint64_t kSeed = 20260101;

std::vector<zrp::RatePtr> monotone_rates() {
  return {zrp::share(JumpRate::linear()), zrp::share(JumpRate::indicator()), zrp::share(JumpRate::power(0.5))};
}

ModelParams model(int n, double theta, double kappa, double a, double b, double l, double d, zrp::RatePtr rate) {
  ModelParams p;
  p.n = n;
  p.theta = theta;
  p.kappa = kappa;
  p.alpha = a;
  p.beta = b;
  p.lambda = l;
  p.delta = d;
  p.rate = std::move(rate);
  return p;
}

zrp::ExperimentConfig config(const std::string& text) {
  std::istringstream is(text);
  return zrp::parse_config(is);
}

struct Outcome {
  bool ok;
  std::string detail;
};

class Clock {
 public:
  Clock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// CSV text of every run, keyed by criterion; compared on the second pass.
using Csvs = std::map<std::string, std::string>;

// ------------------------------------------------------------ criteria

Outcome thermo_round_trip(Csvs& out) {
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& g : monotone_rates()) {
    const ThermoTable t(g);
    for (int i = 1; i <= 100; ++i) {
      const double rho = 0.1 * i;
      const double back = t.mean_density(t.flux(rho));
      worst = std::max(worst, std::abs(back - rho));
      os << g->name() << ',' << rho << ',' << back << '\n';
    }
  }
  out["thermo"] = os.str();
  return {worst < kRoundTripTol, fmt("max |R(Phi(rho)) - rho| = %.2e", worst)};
}

Outcome flux_lipschitz() {
  int violations = 0;
  double worst = -INFINITY;
  for (const auto& g : monotone_rates()) {
    const ThermoTable t(g);
    const double gs = g->g_star();
    std::vector<double> rho, phi;
    for (int i = 0; i <= 100; ++i) {
      rho.push_back(0.1 * i);
      phi.push_back(t.flux(rho.back()));
    }
    for (std::size_t i = 0; i < rho.size(); ++i)
      for (std::size_t j = i + 1; j < rho.size(); ++j) {
        const double excess = std::abs(phi[j] - phi[i]) - gs * std::abs(rho[j] - rho[i]);
        worst = std::max(worst, excess);
        if (excess > kLipschitzSlack) ++violations;
      }
  }
  return {violations == 0, fmt("%g violating pairs, max |dPhi| - g*|drho| = %.2e", violations, worst)};
}

Outcome ness_stationarity(Csvs& out) {
  const auto cfg = config(
      "[model]\nN = 16\ntheta = 1\nkappa = 1\nalpha = 2\nbeta = 1\nlambda = 1\ndelta = 1\nrate = power:gamma=0.5\n"
      "[experiment]\nkind = stationarity\nsamples = 1000000\nseed = " +
      std::to_string(kSeed) + "\n");
  const auto r = zrp::stationarity_probe(cfg);
  std::ostringstream os;
  zrp::write_probe_csv(os, r);
  out["stationarity"] = os.str();
  const double worst = r.max_ratio.at(1.0);
  return {worst < kRatioLimit, fmt("%g functions, max |estimate|/se = %.3f", static_cast<double>(r.rows.size()), worst)};
}

Outcome attractiveness() {
  constexpr int kSeeds = 20;
  constexpr std::uint64_t kEvents = 1'000'000;
  std::uint64_t violations = 0;
  std::uint64_t events = 0;
  for (const auto& g : monotone_rates()) {
    const ThermoTable t(g);
    const bool bounded = g->family() == zrp::RateFamily::indicator;
    const auto p = model(32, 1.0, 1.0, bounded ? 0.3 : 2.0, bounded ? 0.2 : 1.0, 1.0, 1.0, g);
    const auto ness = zrp::ness_fugacity(p);
    auto half = ness;
    for (double& v : half.values) v *= 0.5;
    const zrp::ProductSampler upper(ness, t);
    const zrp::ProductSampler lower(half, t);
    for (int s = 0; s < kSeeds; ++s) {
      const auto seed = zrp::derive_seed(kSeed, static_cast<std::uint64_t>(s));
      zrp::Rng rng(seed);
      auto [lo, up] = zrp::sample_monotone_pair(lower, upper, rng);
      zrp::CoupledSimulator sim(p, lo, up, zrp::derive_seed(seed, 1));
      if (!sim.tracking_order()) {
        ++violations;
        continue;
      }
      try {
        for (std::uint64_t i = 0; i < kEvents; ++i) sim.step();
      } catch (const zrp::OrderViolation&) {
        ++violations;
      }
      events += sim.events();
      if (!sim.lower().below(sim.upper())) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f coupled events, %.0f violations", static_cast<double>(events),
                               static_cast<double>(violations))};
}

Outcome spectral(Csvs& out) {
  double exact = 0.0;
  for (const auto& g : monotone_rates()) {
    const double two_g1 = 2.0 * (*g)(1);
    exact = std::max(exact, std::abs(zrp::spectral_gap(zrp::build_single_box(2, 1, *g)) - two_g1));
    exact = std::max(exact, std::abs(zrp::spectral_gap(zrp::build_coupled(1, 1, *g)) - two_g1));
  }
  const auto ind = zrp::share(JumpRate::indicator());
  exact = std::max(exact, std::abs(zrp::spectral_gap(zrp::build_single_box(3, 1, *ind)) - 1.0));

  const std::vector<zrp::RatePtr> rates{ind};
  const std::vector<int> ells{2, 3, 4, 5, 6, 7, 8};
  const std::vector<int> js{1, 2, 3, 4, 5, 6, 7, 8};
  const auto rows = zrp::gap_scan(rates, ells, js);
  double min_scaled = INFINITY;
  for (const auto& r : rows) min_scaled = std::min(min_scaled, r.scaled());
  std::ostringstream os;
  zrp::write_gap_csv(os, rows);
  out["gaps"] = os.str();

  double defect = 0.0;
  for (const auto& g : monotone_rates())
    defect = std::max(defect, zrp::total_variance_decomposition_check(3, 4, *g, 100, kSeed));
  const bool ok = exact < kExactTol && min_scaled > kScaledGapFloor && defect < kExactTol;
  return {ok, fmt("exact gaps off by %.1e, min gap*l^2 = %.4f, variance defect %.1e", exact, min_scaled, defect)};
}

Outcome pde_stationary(Csvs& out) {
  double off_line = 0.0;
  double off_limit = 0.0;
  for (const auto& g : monotone_rates()) {
    const ThermoTable t(g);
    const auto p = model(100, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, g);
    if (p.ness_ratios()[0] >= t.phi_star() || p.ness_ratios()[1] >= t.phi_star()) continue;
    const auto s = zrp::stationary(p, t, 128);
    for (int i = 0; i < 128; ++i) {
      const double u = s.field.center(i);
      off_line = std::max(off_line, std::abs(s.flux_at(u) - (5.0 - u) / 3.0));
      // limiting fugacity for θ = 1
      const double limit = (-(p.alpha * p.delta - p.beta * p.lambda) * u + p.alpha * p.delta + p.alpha + p.beta) /
                           (p.lambda * p.delta + p.lambda + p.delta);
      off_limit = std::max(off_limit, std::abs(s.flux_at(u) - limit));
      off_limit = std::max(off_limit, std::abs(zrp::asymptotic_profile(p, t, u).fugacity - limit));
    }
  }
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = model(100, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, poi.rate_ptr());
  zrp::PdeOptions opt;
  opt.cells = 128;
  opt.t_end = 5.0;
  opt.frame_interval = 1.0;
  const auto traj = zrp::solve(p, poi, [](double) { return 1.5; }, opt);
  const double l1 = zrp::l1_distance(traj.final(), zrp::stationary(p, poi, 128).field);
  std::ostringstream os;
  zrp::write_trajectory_csv(os, traj);
  out["pde"] = os.str();
  const bool ok = off_line < kExactTol && off_limit < kExactTol && l1 < kStationaryL1;
  return {ok, fmt("line off by %.1e, limit fugacity off by %.1e, L1(t=5) = %.2e", off_line, off_limit, l1)};
}

Outcome mass_balance() {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto gamma = [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); };
  zrp::PdeOptions opt;
  opt.cells = 256;
  opt.t_end = 0.2;
  const auto neumann = zrp::solve(model(100, 2.0, 1.0, 2.0, 1.0, 1.0, 1.0, sq.rate_ptr()), sq, gamma, opt);
  const double drift = std::abs(neumann.final().mass() - neumann.frames.front().mass()) / opt.t_end;

  const auto p = model(100, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, sq.rate_ptr());
  const auto robin = zrp::solve(p, sq, gamma, opt);
  double inflow = 0.0;
  for (std::size_t n = 0; n + 1 < robin.frames.size(); ++n) {
    const double dt = robin.frames[n + 1].t - robin.frames[n].t;
    inflow += dt * ((p.beta - p.delta * robin.right_trace[n]) - (p.lambda * robin.left_trace[n] - p.alpha));
  }
  const double balance = std::abs(robin.final().mass() - robin.frames.front().mass() - inflow);
  return {drift < kNeumannDrift && balance < kRobinBalance,
          fmt("Neumann drift %.1e per unit time, Robin flux identity off by %.1e", drift, balance)};
}

Outcome weak_form() {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto p = model(100, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, sq.rate_ptr());
  const auto gamma = [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); };
  const std::vector<zrp::TestFunction> tests{
      {[](double t, double u) { return std::exp(-t) * std::cos(M_PI * u); },
       [](double t, double u) { return -std::exp(-t) * std::cos(M_PI * u); },
       [](double t, double u) { return -M_PI * std::exp(-t) * std::sin(M_PI * u); },
       [](double t, double u) { return -M_PI * M_PI * std::exp(-t) * std::cos(M_PI * u); }},
      {[](double t, double u) { return (1.0 + t) * u * u; }, [](double, double u) { return u * u; },
       [](double t, double u) { return 2.0 * (1.0 + t) * u; }, [](double t, double) { return 2.0 * (1.0 + t); }},
      {[](double t, double u) { return std::sin(2.0 * M_PI * u) + t * u; }, [](double, double u) { return u; },
       [](double t, double u) { return 2.0 * M_PI * std::cos(2.0 * M_PI * u) + t; },
       [](double, double u) { return -4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * u); }},
  };
  std::vector<std::vector<double>> res(tests.size());
  for (int m : {64, 128, 256}) {
    zrp::PdeOptions opt;
    opt.cells = m;
    opt.t_end = 0.1;
    const auto traj = zrp::solve(p, sq, gamma, opt);
    for (std::size_t k = 0; k < tests.size(); ++k) res[k].push_back(zrp::weak_residual(traj, tests[k], 0.1));
  }
  double worst = INFINITY;
  std::string detail;
  for (const auto& r : res) {
    worst = std::min({worst, r[0] / r[1], r[1] / r[2]});
    detail += fmt(" %.1e/%.1e/%.1e", r[0], r[1], r[2]);
  }
  return {worst >= kResidualRatio, fmt("min ratio per doubling %.2f; residuals", worst) + detail};
}

Outcome hydro_convergence(Csvs& out, double threshold) {
  const auto cfg = config(
      "[model]\ntheta = 2\nkappa = 1\nalpha = 1\nbeta = 1\nlambda = 1\ndelta = 1\nrate = linear\n"
      "[experiment]\nkind = hydro\ninitial = constant:0.5\nN_list = 64, 128, 256\nreplicas = 100\n"
      "checkpoints = 0.05\nseed = " +
      std::to_string(kSeed) + "\n");
  const auto r = zrp::hydro_compare(cfg);
  std::ostringstream os;
  zrp::write_hydro_csv(os, r);
  out["hydro"] = os.str();
  const double e64 = r.errors[0].err, e128 = r.errors[1].err, e256 = r.errors[2].err;
  const bool ok = e64 > e128 && e128 > e256 && e256 < threshold;
  return {ok, fmt("err(N, 0.05) = %.4f, %.4f, %.4f; threshold %.3f", e64, e128, e256, threshold)};
}

Outcome hydrostatic(Csvs& out) {
  const auto cfg = config(
      "[model]\nN = 64\ntheta = 1\nkappa = 1\nalpha = 2\nbeta = 1\nlambda = 1\ndelta = 1\nrate = power:gamma=0.5\n"
      "[experiment]\nkind = hydrostatic\ninitial = ness\nreplicas = 100\naveraging_time = 1\nsamples = 1000\n"
      "seed = " +
      std::to_string(kSeed) + "\n");
  const auto r = zrp::hydrostatic(cfg);
  std::ostringstream os;
  zrp::write_hydrostatic_csv(os, r);
  out["hydrostatic"] = os.str();
  const double z = r.summary.front().max_abs_z;
  return {z < kZLimit, fmt("max |z| over 63 sites = %.3f, sup |mean - R(phi)| = %.4f", z, r.summary.front().sup_ness)};
}

Outcome dynkin(Csvs& out) {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto p = model(64, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, sq.rate_ptr());
  const zrp::ProductSampler start(zrp::density_profile(64, sq, [](double u) { return 0.5 + u; }), sq);
  const auto g = [](double u) { return std::sin(M_PI * u) + u; };
  constexpr double kT = 0.5;
  const auto task = [&](std::size_t r) {
    const auto seed = zrp::derive_seed(kSeed, r);
    zrp::Rng rng(seed);
    zrp::Simulator sim(p, start.sample(rng), zrp::derive_seed(seed, 1));
    zrp::DynkinTracker tracker(sim, g);
    std::vector<zrp::Observer*> obs{&tracker};
    sim.run(kT, obs);
    return std::array<double, 2>{tracker.martingale(), tracker.quadratic_variation_integral()};
  };
  const auto rows = zrp::run_replicas<std::array<double, 2>>(100, task);
  std::vector<double> m, b;
  std::ostringstream os;
  for (const auto& [mt, bt] : rows) {
    m.push_back(mt);
    b.push_back(bt);
    os << mt << ',' << bt << '\n';
  }
  out["dynkin"] = os.str();
  const double z_mean = zrp::mean(m) / zrp::std_error(m);
  const double var = zrp::sample_variance(m);
  const double qv = zrp::mean(b);
  const double rel_se = std::hypot(zrp::variance_std_error(m) / var, zrp::std_error(b) / qv);
  const double z_var = std::abs(var / qv - 1.0) / rel_se;
  return {std::abs(z_mean) < kMartingaleZ && z_var < kVarianceRelZ,
          fmt("mean M_T / se = %.2f; Var M_T = %.4g vs E int B = %.4g (%.2f rel. se)", z_mean, var, qv, z_var)};
}

double read_threshold() {
  std::ifstream in(std::filesystem::path(ZRP_SOURCE_DIR) / "config" / "acceptance.json");
  if (!in) return NAN;
  return nlohmann::json::parse(in)["hydro_convergence"]["threshold_err_256"].get<double>();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome(Csvs&)> run;
  };
  const double threshold = read_threshold();
  const std::vector<Criterion> criteria{
      {1, "thermo round trip", kLimit1, thermo_round_trip},
      {2, "flux Lipschitz", kLimit2, [](Csvs&) { return flux_lipschitz(); }},
      {3, "stationary product state", kLimit3, ness_stationarity},
      {4, "attractiveness", kLimit4, [](Csvs&) { return attractiveness(); }},
      {5, "spectral gaps", kLimit5, spectral},
      {6, "PDE stationary profile", kLimit6, pde_stationary},
      {7, "mass balance", kLimit7, [](Csvs&) { return mass_balance(); }},
      {8, "weak-form residual", kLimit8, [](Csvs&) { return weak_form(); }},
      {9, "hydrodynamic convergence", kLimit9, [threshold](Csvs& c) { return hydro_convergence(c, threshold); }},
      {10, "hydrostatic profile", kLimit10, hydrostatic},
      {11, "Dynkin martingale", kLimit11, dynkin},
  };

  Csvs first;
  int failed = 0;
  for (const auto& c : criteria) {
    const Clock clock;
    Outcome o{false, ""};
    try {
      o = c.run(first);
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = clock.seconds();
    const bool pass = o.ok && s < c.limit;
    if (!pass) ++failed;
    std::printf("%-4s %2d %-26s %s | %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), s,
                c.limit);
    std::fflush(stdout);
  }

  // Determinism: every criterion that writes CSV output again, same seeds.
  Csvs second;
  std::string differing;
  for (const auto& c : criteria) {
    if (c.id == 2 || c.id == 4 || c.id == 7 || c.id == 8) continue;
    try {
      c.run(second);
    } catch (const std::exception&) {
    }
  }
  for (const auto& [key, text] : first)
    if (!second.count(key) || second.at(key) != text) differing += " " + key;
  const bool same = differing.empty() && first.size() == second.size();
  if (!same) ++failed;
  std::printf("%-4s %2d %-26s %zu CSV outputs rerun, %s\n", same ? "PASS" : "FAIL", 12, "determinism", first.size(),
              same ? "all identical" : ("differ:" + differing).c_str());
  return failed == 0 ? 0 : 1;
}
