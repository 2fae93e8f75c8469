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
#include <cmath>

#include "zrp/ensemble.hpp"
#include "zrp/harness.hpp"
#include "zrp/random.hpp"
#include "zrp/simulator.hpp"
#include "zrp/stats.hpp"

namespace zrp {

namespace {

constexpr int kBootstrapResamples = 1000;

std::vector<int> sizes_of(const ExperimentConfig& cfg) {
  return cfg.n_list.empty() ? std::vector<int>{cfg.params.n} : cfg.n_list;
}

std::vector<double> sorted_checkpoints(const ExperimentConfig& cfg) {
  std::vector<double> out = cfg.checkpoints;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Cell-centred field evaluated at u by linear interpolation, constant past
// the outer centres.
double sample_field(const DensityField& f, double u) {
  const double pos = u * f.cells() - 0.5;
  if (pos <= 0.0) return f.rho.front();
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= f.rho.size()) return f.rho.back();
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * f.rho[i] + w * f.rho[i + 1];
}

}  // namespace

std::vector<double> box_smooth(std::span<const double> v, int n, double bandwidth) {
  const int w = std::max(1, static_cast<int>(std::floor(bandwidth * n)));
  const int sites = n - 1;
  std::vector<double> prefix(static_cast<std::size_t>(sites) + 1, 0.0);
  for (int x = 1; x <= sites; ++x) prefix[static_cast<std::size_t>(x)] = prefix[static_cast<std::size_t>(x - 1)] + v[static_cast<std::size_t>(x - 1)];
  std::vector<double> out(static_cast<std::size_t>(sites));
  for (int x = 1; x <= sites; ++x) {
    const int lo = std::max(1, x - w);
    const int hi = std::min(sites, x + w);
    out[static_cast<std::size_t>(x - 1)] =
        (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo - 1)]) / (hi - lo + 1);
  }
  return out;
}

HydroReport hydro_compare(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const ThermoTable thermo(cfg.params.rate);
  const auto stops = sorted_checkpoints(cfg);

  // PDE reference at every checkpoint, solved segment by segment.
  std::function<double(double)> gamma;
  if (cfg.initial.is_density()) {
    gamma = cfg.initial.density(cfg.params, thermo);
  } else {
    gamma = [&](double u) { return asymptotic_profile(cfg.params, thermo, u).density; };
  }
  std::vector<DensityField> pde_at;
  {
    DensityField cur;
    double t = 0.0;
    std::function<double(double)> start = gamma;
    for (double stop : stops) {
      PdeOptions opt;
      opt.cells = cfg.cells;
      opt.t_end = stop - t;
      opt.frame_interval = opt.t_end > 0.0 ? opt.t_end : 0.0;
      const Trajectory traj = solve(cfg.params, thermo, start, opt);
      cur = traj.final();
      cur.t = stop;
      pde_at.push_back(cur);
      start = [cur](double u) { return cur.rho[std::min(cur.rho.size() - 1, static_cast<std::size_t>(u * cur.cells()))]; };
      t = stop;
    }
  }

  HydroReport report;
  for (int n : sizes_of(cfg)) {
    ModelParams p = cfg.params;
    p.n = n;
    const std::uint64_t seed_n = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    const FugacityProfile profile = cfg.initial.fugacity(p, thermo);
    const ProductSampler sampler(profile, thermo);
    const double eps = cfg.bandwidth_for(n);

    // profiles[replica][checkpoint] = smoothed site densities.
    using Profiles = std::vector<std::vector<double>>;
    const auto task = [&](std::size_t r) {
      Rng init(derive_seed(seed_n, 2 * r));
      Configuration c0 = sampler.sample(init);
      Simulator sim(p, std::move(c0), derive_seed(seed_n, 2 * r + 1));
      SnapshotRecorder rec;
      std::vector<Observer*> obs{&rec};
      Profiles out;
      const auto smooth = [&](const Configuration& c) {
        std::vector<double> v(c.occupations().begin(), c.occupations().end());
        return box_smooth(v, n, eps);
      };
      if (stops.front() == 0.0) out.push_back(smooth(sim.config()));
      sim.run(stops.back(), obs, stops);
      for (const auto& [t, c] : rec.snapshots()) out.push_back(smooth(c));
      return out;
    };
    const auto all = run_replicas<Profiles>(static_cast<std::size_t>(cfg.replicas), task, workers);

    for (std::size_t k = 0; k < stops.size(); ++k) {
      std::vector<double> pde_sites(static_cast<std::size_t>(n - 1));
      for (int x = 1; x <= n - 1; ++x)
        pde_sites[static_cast<std::size_t>(x - 1)] = sample_field(pde_at[k], static_cast<double>(x) / n);
      const auto pde_smooth = box_smooth(pde_sites, n, eps);

      // Per-replica distance ∫|ρ̂ - ρ| du; its replica mean is the error.
      std::vector<double> dist(all.size(), 0.0);
      for (std::size_t r = 0; r < all.size(); ++r) {
        for (std::size_t i = 0; i < pde_smooth.size(); ++i) dist[r] += std::abs(all[r][k][i] - pde_smooth[i]);
        dist[r] /= n;
      }
      const auto err_of = [&](std::span<const std::size_t> idx) {
        double acc = 0.0;
        for (auto r : idx) acc += dist[r];
        return acc / static_cast<double>(idx.size());
      };
      // Distance of the replica-averaged profile.
      const auto mean_err_of = [&](std::span<const std::size_t> idx) {
        std::vector<double> mean_profile(pde_smooth.size(), 0.0);
        for (auto r : idx)
          for (std::size_t i = 0; i < mean_profile.size(); ++i) mean_profile[i] += all[r][k][i];
        double acc = 0.0;
        for (std::size_t i = 0; i < mean_profile.size(); ++i)
          acc += std::abs(mean_profile[i] / static_cast<double>(idx.size()) - pde_smooth[i]);
        return acc / n;
      };
      std::vector<std::size_t> identity(all.size());
      for (std::size_t r = 0; r < identity.size(); ++r) identity[r] = r;
      HydroRow row{n, stops[k], err_of(identity), 0.0, mean_err_of(identity), 0.0};
      row.se = bootstrap_std_error(all.size(), err_of, kBootstrapResamples, derive_seed(seed_n, 0xb007000 + k));
      row.mean_profile_se = bootstrap_std_error(all.size(), mean_err_of, kBootstrapResamples,
                                                derive_seed(seed_n, 0xb008000 + k));
      report.errors.push_back(row);
      for (int x = 1; x <= n - 1; ++x) {
        double m = 0.0;
        for (const auto& rep : all) m += rep[k][static_cast<std::size_t>(x - 1)];
        report.profiles.push_back({n, stops[k], static_cast<double>(x) / n, m / static_cast<double>(all.size()),
                                   pde_smooth[static_cast<std::size_t>(x - 1)]});
      }
    }
  }
  return report;
}

HydrostaticReport hydrostatic(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const ThermoTable thermo(cfg.params.rate);
  HydrostaticReport report;
  std::vector<double> ns;
  std::vector<double> vars;
  for (int n : sizes_of(cfg)) {
    ModelParams p = cfg.params;
    p.n = n;
    const std::uint64_t seed_n = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
    const FugacityProfile ness = ness_fugacity(p);
    const ProductSampler start(cfg.initial.fugacity(p, thermo), thermo);

    const auto task = [&](std::size_t r) {
      Rng init(derive_seed(seed_n, 2 * r));
      Simulator sim(p, start.sample(init), derive_seed(seed_n, 2 * r + 1));
      if (cfg.burn_in > 0.0) sim.run(cfg.burn_in);
      OccupationIntegrator occ(sim);
      std::vector<Observer*> obs{&occ};
      sim.run(cfg.burn_in + cfg.averaging_time, obs);
      auto v = occ.integrals(sim);
      for (double& x : v) x /= cfg.averaging_time;
      return v;
    };
    const auto all = run_replicas<std::vector<double>>(static_cast<std::size_t>(cfg.replicas), task, workers);

    HydrostaticSummary s{n, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (int x = 1; x <= n - 1; ++x) {
      std::vector<double> col(all.size());
      for (std::size_t r = 0; r < all.size(); ++r) col[r] = all[r][static_cast<std::size_t>(x - 1)];
      const double m = mean(col);
      const double se = std_error(col);
      const double u = static_cast<double>(x) / n;
      const double target = thermo.mean_density(ness(x));
      const double asym = asymptotic_profile(p, thermo, u).density;
      const double z = se > 0.0 ? (m - target) / se : (m == target ? 0.0 : INFINITY);
      report.sites.push_back({n, x, u, m, se, target, asym, z});
      s.sup_ness = std::max(s.sup_ness, std::abs(m - target));
      s.l1_ness += std::abs(m - target) / n;
      s.sup_asymptotic = std::max(s.sup_asymptotic, std::abs(m - asym));
      s.l1_asymptotic += std::abs(m - asym) / n;
      s.max_abs_z = std::max(s.max_abs_z, std::abs(z));
    }
    report.summary.push_back(s);

    // Var⟨π, H⟩ with H(u) = u under the stationary product state.
    const ProductSampler ness_sampler(ness, thermo);
    Rng rng(derive_seed(seed_n, 0xc0c0));
    std::vector<double> pairings(cfg.samples);
    for (auto& v : pairings) v = empirical_pairing(ness_sampler.sample(rng), [](double u) { return u; });
    const double var = sample_variance(pairings);
    report.concentration.push_back({n, var, variance_std_error(pairings)});
    ns.push_back(n);
    vars.push_back(var);
  }
  if (ns.size() >= 2) report.concentration_slope = log_log_slope(ns, vars);
  return report;
}

std::vector<CylinderFunction> probe_functions(const ModelParams& p) {
  const int n = p.n;
  const RatePtr rate = p.rate;
  std::vector<CylinderFunction> out;
  for (int x : {1, n / 2, n - 1}) {
    out.push_back({"eta", {x}, [x](const Configuration& c) { return static_cast<double>(c(x)); }});
    out.push_back({"eta^2", {x}, [x](const Configuration& c) {
                     const double v = c(x);
                     return v * v;
                   }});
    out.push_back({"g(eta)", {x}, [x, rate](const Configuration& c) { return (*rate)(c(x)); }});
    const int y = x == n - 1 ? n - 2 : x;
    out.push_back({"eta*eta_next", {y, y + 1}, [y](const Configuration& c) {
                     return static_cast<double>(c(y)) * static_cast<double>(c(y + 1));
                   }});
  }
  return out;
}

ProbeReport stationarity_probe(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const ThermoTable thermo(cfg.params.rate);
  const ModelParams& p = cfg.params;
  const ProductSampler sampler(ness_fugacity(p), thermo);
  const auto funcs = probe_functions(p);
  const std::vector<double> kappas = cfg.kappa_list.empty() ? std::vector<double>{p.kappa} : cfg.kappa_list;
  std::vector<ModelParams> variants;
  for (double k : kappas) {
    ModelParams q = p;
    q.kappa = k;
    variants.push_back(q);
  }

  const std::uint64_t chunks = std::min<std::uint64_t>(64, cfg.samples);
  using Acc = std::vector<RunningStats>;  // [kappa * funcs + f]
  const auto task = [&](std::size_t c) {
    const std::uint64_t lo = cfg.samples * c / chunks;
    const std::uint64_t hi = cfg.samples * (c + 1) / chunks;
    Rng rng(derive_seed(cfg.seed, c));
    Acc acc(variants.size() * funcs.size());
    for (std::uint64_t s = lo; s < hi; ++s) {
      Configuration config = sampler.sample(rng);
      for (std::size_t k = 0; k < variants.size(); ++k)
        for (std::size_t f = 0; f < funcs.size(); ++f)
          acc[k * funcs.size() + f].add(apply_generator(variants[k], config, funcs[f]));
    }
    return acc;
  };
  const auto parts = run_replicas<Acc>(static_cast<std::size_t>(chunks), task, workers);
  Acc total(variants.size() * funcs.size());
  for (const auto& part : parts)
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(part[i]);

  ProbeReport report;
  for (std::size_t k = 0; k < variants.size(); ++k) {
    double worst = 0.0;
    for (std::size_t f = 0; f < funcs.size(); ++f) {
      const auto& st = total[k * funcs.size() + f];
      const double se = st.std_error();
      const double ratio = se > 0.0 ? std::abs(st.mean()) / se : (st.mean() == 0.0 ? 0.0 : INFINITY);
      report.rows.push_back({kappas[k], funcs[f].name, funcs[f].support.front(), st.mean(), se, ratio});
      worst = std::max(worst, ratio);
    }
    report.max_ratio[kappas[k]] = worst;
  }
  return report;
}

SpectralReport spectral_scan(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  std::vector<RatePtr> rates;
  for (const auto& spec : cfg.spectral_rates) rates.push_back(share(JumpRate::parse(spec)));
  SpectralReport report;
  report.gaps = gap_scan(rates, cfg.ells, cfg.particles, workers);

  struct Job {
    std::size_t rate;
    int ell;
    int j;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < rates.size(); ++r)
    for (int ell : cfg.ells)
      for (int j : cfg.particles)
        if (CanonicalSpace::count(2 * ell, j) <= 3000.0) jobs.push_back({r, ell, j});
  report.coupled = run_replicas<CoupledRow>(
      jobs.size(),
      [&](std::size_t i) {
        const Job& job = jobs[i];
        const JumpRate& g = *rates[job.rate];
        return CoupledRow{g.name(), job.ell, job.j, coupled_gap_bound(job.ell, job.j, g),
                          total_variance_decomposition_check(job.ell, job.j, g, 100, derive_seed(cfg.seed, i))};
      },
      workers);
  return report;
}

std::vector<ThermoRow> thermo_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const ThermoTable thermo(cfg.params.rate);
  std::vector<ThermoRow> rows;
  for (int i = 0; i < cfg.points; ++i) {
    const double rho = cfg.rho_max * i / (cfg.points - 1);
    const double phi = thermo.flux(rho);
    rows.push_back({rho, phi, thermo.partition_function(phi), thermo.variance(phi),
                    std::abs(thermo.mean_density(phi) - rho)});
  }
  return rows;
}

}  // namespace zrp
