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

#include <cmath>
#include <vector>

#include "zrp/pde.hpp"

using zrp::JumpRate;
using zrp::ModelParams;
using zrp::PdeOptions;
using zrp::ThermoTable;

namespace {

ModelParams params(double theta, double a, double b, double l, double d, zrp::RatePtr rate, double kappa = 1.0) {
  ModelParams p;
  p.n = 100;
  p.theta = theta;
  p.kappa = kappa;
  p.alpha = a;
  p.beta = b;
  p.lambda = l;
  p.delta = d;
  p.rate = std::move(rate);
  return p;
}

zrp::TestFunction constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }};
}

}  // namespace

TEST_CASE("flux interpolant") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const zrp::FluxInterpolant f(sq, 4.0);
  for (double rho : {0.0, 0.0005, 0.37, 1.0, 2.2221, 3.9999, 4.5}) {
    CHECK(f(rho) == doctest::Approx(sq.flux(rho, 1e-12)).epsilon(1e-6).scale(1.0));
  }
  // slope between nodes matches the finite difference of Φ
  const double d = f.derivative(1.0005);
  CHECK(d == doctest::Approx((sq.flux(1.001, 1e-13) - sq.flux(1.0, 1e-13)) / 1e-3).epsilon(1e-6));
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const zrp::FluxInterpolant id(poi, 3.0);
  for (double rho : {0.1234, 1.5, 2.9}) CHECK(id(rho) == doctest::Approx(rho).epsilon(1e-10));
}

TEST_CASE("constants solve the Neumann problem") {
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = params(2.0, 1, 1, 1, 1, poi.rate_ptr());
  PdeOptions opt;
  opt.cells = 64;
  opt.t_end = 0.2;
  const auto traj = zrp::solve(p, poi, [](double) { return 0.7; }, opt);
  for (const auto& frame : traj.frames)
    for (double r : frame.rho) CHECK(r == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("cosine mode of the heat equation") {
  // Poisson rates: Φ = id, θ > 1 gives the Neumann heat equation with exact
  // solution 1 + 0.5 cos(πu) e^{-π² t}.
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = params(1.5, 1, 1, 1, 1, poi.rate_ptr());
  const double t = 0.05;
  std::vector<double> err;
  for (int m : {32, 64, 128}) {
    PdeOptions opt;
    opt.cells = m;
    opt.t_end = t;
    opt.frame_interval = t;
    const auto traj = zrp::solve(p, poi, [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); }, opt);
    double e = 0.0;
    for (int i = 0; i < m; ++i) {
      const double u = traj.final().center(i);
      e += std::abs(traj.final().rho[static_cast<std::size_t>(i)] - (1.0 + 0.5 * std::cos(M_PI * u) * std::exp(-M_PI * M_PI * t)));
    }
    err.push_back(e / m);
  }
  CHECK(err[2] < 1e-4);
  CHECK(err[0] / err[1] > 3.5);
  CHECK(err[1] / err[2] > 3.5);
}

TEST_CASE("stationary profile") {
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = params(1.0, 2, 1, 1, 1, poi.rate_ptr());
  const auto [a, b] = zrp::stationary_flux_line(p);
  CHECK(a == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(b == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  // Robin conditions at both ends
  CHECK(a == doctest::Approx(p.lambda * b - p.alpha));
  CHECK(a == doctest::Approx(p.beta - p.delta * (a + b)));
  const auto s = zrp::stationary(p, poi, 50);
  for (int i = 0; i < 50; ++i) {
    const double u = s.field.center(i);
    CHECK(s.field.rho[static_cast<std::size_t>(i)] == doctest::Approx((-u + 5.0) / 3.0).epsilon(1e-10));
  }
  const auto fast = params(2.0, 2, 1, 1, 1, poi.rate_ptr());
  CHECK(zrp::stationary_flux_line(fast).first == 0.0);
  CHECK(zrp::stationary_flux_line(fast).second == doctest::Approx(1.5));
  const auto balanced = params(1.0, 2, 1, 2, 1, poi.rate_ptr(), 1.0);
  CHECK(std::abs(zrp::stationary_flux_line(balanced).first) < 1e-15);
  // κ enters the stationary line for θ = 1
  const auto k3 = params(1.0, 2, 1, 1, 1, poi.rate_ptr(), 3.0);
  const auto [a3, b3] = zrp::stationary_flux_line(k3);
  CHECK(a3 == doctest::Approx(3.0 * (b3 - 2.0)));
  CHECK(a3 == doctest::Approx(3.0 * (1.0 - (a3 + b3))));
}

TEST_CASE("discrete stationary state is a fixed point") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto p = params(1.0, 2, 1, 1, 1, sq.rate_ptr(), 0.7);
  const auto s = zrp::stationary(p, sq, 64);
  const zrp::FluxInterpolant f(sq, 3.0);
  auto rho = s.field.rho;
  std::vector<double> scratch;
  zrp::explicit_step_serial(p, f, rho, scratch, zrp::default_dt(p, 1.0, 64));
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(rho[i] == doctest::Approx(s.field.rho[i]).epsilon(1e-8));
}

TEST_CASE("long-time limit") {
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = params(1.0, 2, 1, 1, 1, poi.rate_ptr());
  PdeOptions opt;
  opt.cells = 128;
  opt.t_end = 5.0;
  opt.frame_interval = 1.0;
  const auto traj = zrp::solve(p, poi, [](double) { return 1.5; }, opt);
  CHECK(zrp::l1_distance(traj.final(), zrp::stationary(p, poi, 128).field) < 1e-4);
}

TEST_CASE("mass balance") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto gamma = [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); };
  SUBCASE("Neumann") {
    const auto p = params(2.0, 2, 1, 1, 1, sq.rate_ptr());
    PdeOptions opt;
    opt.cells = 128;
    opt.t_end = 0.2;
    const auto traj = zrp::solve(p, sq, gamma, opt);
    CHECK(std::abs(traj.final().mass() - traj.frames.front().mass()) < 1e-8 * 0.2);
  }
  SUBCASE("Robin: mass change equals the end fluxes") {
    const auto p = params(1.0, 2, 1, 1, 1, sq.rate_ptr());
    PdeOptions opt;
    opt.cells = 256;
    opt.t_end = 0.1;
    const auto traj = zrp::solve(p, sq, gamma, opt);
    REQUIRE(traj.frames.size() == traj.steps + 1);
    double inflow = 0.0;
    for (std::size_t n = 0; n + 1 < traj.frames.size(); ++n) {
      const double dt = traj.frames[n + 1].t - traj.frames[n].t;
      inflow += dt * ((p.beta - p.delta * traj.right_trace[n]) - (p.lambda * traj.left_trace[n] - p.alpha));
    }
    CHECK(std::abs(traj.final().mass() - traj.frames.front().mass() - inflow) < 1e-6);
    CHECK(std::abs(inflow) > 1e-3);
  }
}

TEST_CASE("stability limit") {
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  const auto p = params(1.0, 2, 1, 1, 1, poi.rate_ptr());
  const double lim = zrp::max_stable_dt(p, 1.0, 64);
  CHECK(lim == doctest::Approx(1.0 / (64.0 * 64.0 * 2.0)));
  CHECK(zrp::default_dt(p, 1.0, 64) < lim);
  PdeOptions opt;
  opt.cells = 64;
  opt.t_end = 0.01;
  opt.dt = 1.01 * lim;
  CHECK_THROWS_AS(zrp::solve(p, poi, [](double) { return 1.0; }, opt), zrp::CflViolation);
  opt.dt = 0.99 * lim;
  CHECK_NOTHROW(zrp::solve(p, poi, [](double) { return 1.0; }, opt));
  // a large κ̃ h pushes the end-cell weight past 2
  const auto stiff = params(1.0, 2, 1, 400, 1, poi.rate_ptr());
  CHECK(zrp::max_stable_dt(stiff, 1.0, 64) < lim);
}

TEST_CASE("non-negativity from an empty start") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto p = params(1.0, 2, 0, 1, 1, sq.rate_ptr());
  PdeOptions opt;
  opt.cells = 64;
  opt.t_end = 0.3;
  const auto traj = zrp::solve(p, sq, [](double u) { return u < 0.5 ? 0.0 : 0.2; }, opt);
  for (const auto& f : traj.frames)
    for (double r : f.rho) CHECK(r >= 0.0);
}

TEST_CASE("semi-implicit step tracks the explicit scheme") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto p = params(1.0, 2, 1, 1, 1, sq.rate_ptr());
  const auto gamma = [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); };
  PdeOptions opt;
  opt.cells = 128;
  opt.t_end = 0.1;
  opt.frame_interval = 0.1;
  const auto ex = zrp::solve(p, sq, gamma, opt);
  opt.semi_implicit = true;
  const auto im = zrp::solve(p, sq, gamma, opt);
  CHECK(im.steps * 4 < ex.steps);
  CHECK(zrp::l1_distance(ex.final(), im.final()) < 1e-4);
  // a step far past the explicit limit stays stable
  opt.dt = 50.0 * zrp::max_stable_dt(p, 1.0, 128);
  const auto big = zrp::solve(p, sq, gamma, opt);
  CHECK(zrp::l1_distance(ex.final(), big.final()) < 1e-2);
}

TEST_CASE("weak residual") {
  const ThermoTable sq(zrp::share(JumpRate::power(0.5)));
  const auto gamma = [](double u) { return 1.0 + 0.5 * std::cos(M_PI * u); };
  PdeOptions opt;
  opt.cells = 256;
  opt.t_end = 0.1;
  const auto p1 = params(1.0, 2, 1, 1, 1, sq.rate_ptr());
  const auto traj = zrp::solve(p1, sq, gamma, opt);
  CHECK(zrp::weak_residual(traj, constant(0.0), 0.1) == 0.0);
  const auto p2 = params(2.0, 2, 1, 1, 1, sq.rate_ptr());
  const auto neumann = zrp::solve(p2, sq, gamma, opt);
  CHECK(zrp::weak_residual(neumann, constant(1.0), 0.1) < 1e-6);
  // G ≡ 1 with θ = 1: the trapezoid rule against the forward-Euler flux
  // sum leaves dt/2 |J(T) - J(0)|
  CHECK(zrp::weak_residual(traj, constant(1.0), 0.1) < traj.dt * 10.0);
}

TEST_CASE("bad input") {
  const ThermoTable poi(zrp::share(JumpRate::linear()));
  auto p = params(1.0, 2, 1, 1, 1, poi.rate_ptr());
  PdeOptions opt;
  opt.cells = 1;
  CHECK_THROWS_AS(zrp::solve(p, poi, [](double) { return 1.0; }, opt), zrp::PdeError);
  opt.cells = 16;
  CHECK_THROWS_AS(zrp::solve(p, poi, [](double) { return -1.0; }, opt), zrp::PdeError);
  p.theta = 0.5;
  CHECK_THROWS_AS(zrp::solve(p, poi, [](double) { return 1.0; }, opt), zrp::PdeError);
}
