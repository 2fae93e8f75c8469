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

#include "zrp/thermo.hpp"

#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>

namespace zrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_phi(double phi) {
  std::ostringstream os;
  os.precision(17);
  os << phi;
  return os.str();
}

}  // namespace

double radius_of_convergence(const JumpRate& g) {
  switch (g.family()) {
    case RateFamily::linear:
    case RateFamily::power:
      return kInf;
    case RateFamily::indicator:
      return 1.0;
    case RateFamily::table:
      return g.tail_value();
    case RateFamily::custom:
      break;
  }
  // Increments bounded below by a positive constant over the last part of
  // the tabulated range: g grows linearly and Z is entire.
  const std::uint64_t top = JumpRate::kCacheSize - 1;
  double min_inc = kInf;
  for (std::uint64_t k = top - 512; k < top; ++k) min_inc = std::min(min_inc, g(k + 1) - g(k));
  if (min_inc > 1e-3) return kInf;
  // Ratio test: consecutive terms shrink by φ/g(k), so the radius is lim g(k).
  return g(top);
}

ThermoTable::ThermoTable(RatePtr rate, double series_tol)
    : rate_(std::move(rate)), series_tol_(series_tol), phi_star_(radius_of_convergence(*rate_)) {
  if (!(series_tol_ > 0.0)) throw ThermoError("series tolerance must be positive");
}

std::array<double, 5> ThermoTable::series(double phi, int max_moment) const {
  if (max_moment < 0 || max_moment > 4) throw ThermoError("moment order must be in [0, 4]");
  if (!(phi >= 0.0)) throw ThermoError("fugacity must be non-negative, got " + fmt_phi(phi));
  if (phi >= phi_star_)
    throw ThermoError("divergence: fugacity " + fmt_phi(phi) + " >= radius of convergence " + fmt_phi(phi_star_));
  std::array<double, 5> sums{1.0, 0.0, 0.0, 0.0, 0.0};
  if (phi == 0.0) return sums;

  const JumpRate& g = *rate_;
  double term = 1.0;  // φ^k / g(k)!
  double prev_top = 0.0;
  double prev_base = 1.0;
  for (std::uint64_t k = 1; k <= kMaxTerms; ++k) {
    term *= phi / g(k);
    if (!std::isfinite(term)) throw ThermoError("divergence: series overflow at fugacity " + fmt_phi(phi));
    const double kd = static_cast<double>(k);
    double w = term;
    sums[0] += term;
    for (int m = 1; m <= max_moment; ++m) {
      w *= kd;
      sums[m] += w;
    }
    const double top = w;
    if (k >= 2) {
      // Geometric majorant from the ratio of the last two terms; valid once
      // the ratio has dropped below one (it is non-increasing for monotone g).
      const double r_top = prev_top > 0.0 ? top / prev_top : 0.0;
      const double r_base = prev_base > 0.0 ? term / prev_base : 0.0;
      if (r_top < 1.0 && r_base < 1.0) {
        const double tail_top = top * r_top / (1.0 - r_top);
        const double tail_base = term * r_base / (1.0 - r_base);
        if (top + tail_top <= series_tol_ * sums[max_moment] && term + tail_base <= series_tol_ * sums[0])
          return sums;
      }
    }
    prev_top = top;
    prev_base = term;
  }
  throw ThermoError("divergence: series tail did not close within " + std::to_string(kMaxTerms) +
                    " terms at fugacity " + fmt_phi(phi));
}

ThermoTable::Entry ThermoTable::lookup(double phi) const {
  const auto key = std::bit_cast<std::uint64_t>(phi);
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto s = series(phi, 1);
  const Entry entry{s[0], s[1] / s[0]};
  std::unique_lock lock(mutex_);
  if (cache_.size() > 200'000) cache_.clear();
  cache_.emplace(key, entry);
  return entry;
}

double ThermoTable::partition_function(double phi) const { return lookup(phi).z; }

double ThermoTable::mean_density(double phi) const { return lookup(phi).r; }

double ThermoTable::moment(double phi, int ell) const {
  if (ell < 1 || ell > 4) throw ThermoError("moment order must be in [1, 4]");
  const auto s = series(phi, ell);
  return s[ell] / s[0];
}

double ThermoTable::variance(double phi) const {
  const auto s = series(phi, 2);
  const double mean = s[1] / s[0];
  return s[2] / s[0] - mean * mean;
}

double ThermoTable::flux(double rho, double tol) const {
  if (!(rho >= 0.0)) throw ThermoError("density must be non-negative");
  if (!(tol > 0.0)) throw ThermoError("flux tolerance must be positive");
  if (rho == 0.0) return 0.0;

  // Φ is g*-Lipschitz with Φ(0) = 0, so R(g*ρ + 1) >= ρ whenever it is defined.
  double hi = rate_->g_star() * rho + 1.0;
  if (hi >= phi_star_) {
    bool found = false;
    for (int m = 1; m <= 60; ++m) {
      hi = phi_star_ * (1.0 - std::ldexp(1.0, -m));
      if (mean_density(hi) >= rho) {
        found = true;
        break;
      }
    }
    if (!found)
      throw ThermoError("bracket expansion failed: density " + fmt_phi(rho) +
                        " is not reachable below the radius of convergence");
  }
  double lo = 0.0;
  double best = hi;
  double best_err = std::abs(mean_density(hi) - rho);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = mean_density(mid);
    const double err = std::abs(r - rho);
    if (err < best_err) {
      best_err = err;
      best = mid;
    }
    if (r < rho)
      lo = mid;
    else
      hi = mid;
  }
  if (!(best_err < tol))
    throw ThermoError("flux root finding stalled at |R(phi) - rho| = " + fmt_phi(best_err));
  return best;
}

}  // namespace zrp
