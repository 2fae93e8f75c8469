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

// Serial reference vs OpenMP kernels.

#include <cmath>

#include <benchmark/benchmark.h>

#include "zrp/ensemble.hpp"
#include "zrp/harness.hpp"
#include "zrp/pde.hpp"
#include "zrp/simulator.hpp"

namespace {

zrp::ModelParams model(int n) {
  zrp::ModelParams p;
  p.n = n;
  p.theta = 1.0;
  p.kappa = 1.0;
  p.alpha = 2.0;
  p.beta = 1.0;
  p.lambda = 1.0;
  p.delta = 1.0;
  p.rate = zrp::share(zrp::JumpRate::power(0.5));
  return p;
}

double replica(const zrp::ModelParams& p, const zrp::ThermoTable& thermo, std::size_t r) {
  zrp::Simulator sim(p, zrp::sample_product(zrp::ness_fugacity(p), thermo, zrp::derive_seed(7, 2 * r)),
                     zrp::derive_seed(7, 2 * r + 1));
  sim.run(0.02);
  return static_cast<double>(sim.config().total());
}

void BM_ReplicasSerial(benchmark::State& state) {
  const auto p = model(64);
  const zrp::ThermoTable thermo(p.rate);
  for (auto _ : state) {
    auto out = zrp::run_replicas_serial<double>(16, [&](std::size_t r) { return replica(p, thermo, r); });
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ReplicasSerial)->Unit(benchmark::kMillisecond);

void BM_ReplicasOpenMP(benchmark::State& state) {
  const auto p = model(64);
  const zrp::ThermoTable thermo(p.rate);
  for (auto _ : state) {
    auto out = zrp::run_replicas<double>(16, [&](std::size_t r) { return replica(p, thermo, r); });
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ReplicasOpenMP)->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_PdeStep(benchmark::State& state) {
  const auto p = model(64);
  const zrp::ThermoTable thermo(p.rate);
  const zrp::FluxInterpolant flux(thermo, 4.0);
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<double> rho(m);
  for (std::size_t i = 0; i < m; ++i) rho[i] = 1.0 + 0.5 * std::cos(M_PI * (i + 0.5) / m);
  std::vector<double> f;
  const double dt = zrp::default_dt(p, thermo.rate().g_star(), static_cast<int>(m));
  for (auto _ : state) {
    if constexpr (Parallel) {
      zrp::explicit_step_parallel(p, flux, rho, f, dt);
    } else {
      zrp::explicit_step_serial(p, flux, rho, f, dt);
    }
    benchmark::DoNotOptimize(rho.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_PdeStep<false>)->Name("BM_PdeStepSerial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_PdeStep<true>)->Name("BM_PdeStepOpenMP")->Arg(1 << 12)->Arg(1 << 16);

void BM_StationarityProbe(benchmark::State& state) {
  zrp::ExperimentConfig cfg;
  cfg.kind = zrp::ExperimentKind::stationarity;
  cfg.params = model(16);
  cfg.samples = 20000;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = zrp::stationarity_probe(cfg, workers);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_StationarityProbe)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
