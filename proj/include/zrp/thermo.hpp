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

#include <array>
#include <cstdint>
#include <limits>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "zrp/rates.hpp"

namespace zrp {

class ThermoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radius of convergence of Z(φ) = Σ φ^k / g(k)!.
/// Closed forms for the shipped families; ratio-test estimate otherwise.
double radius_of_convergence(const JumpRate& g);

/// Grand-canonical thermodynamics of a jump rate: Z, R = E[η], moments and
/// the flux Φ = R⁻¹. Evaluations of (Z, R) are memoized; the cache is
/// guarded so a table can be shared between threads.
class ThermoTable {
 public:
  static constexpr std::uint64_t kMaxTerms = 1'000'000;

  explicit ThermoTable(RatePtr rate, double series_tol = 1e-17);

  const JumpRate& rate() const { return *rate_; }
  const RatePtr& rate_ptr() const { return rate_; }
  double phi_star() const { return phi_star_; }
  double series_tol() const { return series_tol_; }

  double partition_function(double phi) const;
  double mean_density(double phi) const;
  /// R_ℓ(φ) = E[η^ℓ] under the marginal of fugacity φ, 1 <= ℓ <= 4.
  double moment(double phi, int ell) const;
  /// Variance of the single-site marginal.
  double variance(double phi) const;
  /// Φ(ρ): the fugacity with |R(φ) - ρ| < tol. Φ(0) = 0 exactly.
  double flux(double rho, double tol = 1e-10) const;

  /// Raw truncated sums S_m = Σ k^m φ^k / g(k)!, m = 0..max_moment.
  std::array<double, 5> series(double phi, int max_moment) const;

 private:
  struct Entry {
    double z;
    double r;
  };
  Entry lookup(double phi) const;

  RatePtr rate_;
  double series_tol_;
  double phi_star_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, Entry> cache_;
};

}  // namespace zrp
