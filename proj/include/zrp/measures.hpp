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
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/random.hpp"
#include "zrp/rates.hpp"
#include "zrp/thermo.hpp"

namespace zrp {

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the open zero-range process: size N, boundary speed θ,
/// boundary strength κ, reservoir rates α, β (injection) and λ, δ (removal).
struct ModelParams {
  int n = 0;
  double theta = 1.0;
  double kappa = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
  RatePtr rate;

  double n_theta() const;
  /// The two endpoint ratios whose maximum must stay below φ* for the
  /// product stationary state to exist; index 0 is the left end, 1 the right.
  std::array<double, 2> ness_ratios() const;
  /// Range checks only (N >= 3, θ >= 1, κ > 0, reservoir rates >= 0, a rate
  /// is set); enough for the dynamics. Throws ParamError.
  void validate_dynamics() const;
  /// validate_dynamics plus the stationary-state existence condition.
  void validate() const;
};

struct FugacityProfile {
  enum class Source { homogeneous, ness, density_profile, custom };

  int n = 0;
  std::vector<double> values;  // values[x - 1] = φ(x)
  Source source = Source::custom;
  std::string description;

  double operator()(int x) const { return values[static_cast<std::size_t>(x - 1)]; }
  double max() const;
  double min() const;
};

FugacityProfile homogeneous_profile(int n, double phi);

/// Product stationary state: φ̄_N(x) is affine in x and carries no κ.
FugacityProfile ness_fugacity(const ModelParams& p);

/// Slowly varying measure with density γ(x/N): φ(x) = Φ(γ(x/N)).
FugacityProfile density_profile(int n, const ThermoTable& thermo, const std::function<double(double)>& gamma,
                                std::string description = "density-profile");

struct AsymptoticProfile {
  double fugacity;
  double density;
};

/// Limiting fugacity/density profile at macroscopic position u for θ >= 1.
AsymptoticProfile asymptotic_profile(const ModelParams& p, const ThermoTable& thermo, double u);

/// Inverse-CDF sampler for one marginal P(η = k) = φ^k / (Z(φ) g(k)!),
/// truncated where the remaining tail mass drops below 1e-12.
class MarginalSampler {
 public:
  static constexpr double kTailMass = 1e-12;

  MarginalSampler(const ThermoTable& thermo, double phi);

  double fugacity() const { return phi_; }
  /// Quantile of u in [0, 1).
  std::uint32_t quantile(double u) const;
  std::uint32_t sample(Rng& rng) const { return quantile(rng.uniform()); }
  double probability(std::uint64_t k) const;
  std::size_t support_size() const { return cdf_.size(); }

 private:
  double phi_;
  std::vector<double> cdf_;  // unnormalised cumulative weights
};

/// Independent-site sampler for a product measure.
class ProductSampler {
 public:
  ProductSampler(const FugacityProfile& profile, const ThermoTable& thermo);

  int size() const { return n_; }
  const MarginalSampler& marginal(int x) const;
  Configuration sample(Rng& rng) const;
  /// Quantile configuration for per-site uniforms u[x - 1].
  Configuration quantile(std::span<const double> uniforms) const;

 private:
  int n_;
  std::vector<MarginalSampler> distinct_;
  std::vector<std::size_t> site_to_sampler_;
};

Configuration sample_product(const FugacityProfile& profile, const ThermoTable& thermo, std::uint64_t seed);

/// Monotone coupling of two product measures: one shared uniform per site
/// drives both inverse CDFs, so ordered fugacities give ordered samples.
std::pair<Configuration, Configuration> sample_monotone_pair(const ProductSampler& lower, const ProductSampler& upper,
                                                             Rng& rng);

/// H(μ|ν) for product measures, summed site by site.
double relative_entropy(const FugacityProfile& mu, const FugacityProfile& nu, const ThermoTable& thermo);

/// True iff φ_μ(x) <= φ_ν(x) for every x, i.e. μ is stochastically below ν.
bool dominates(const FugacityProfile& mu, const FugacityProfile& nu);

/// CSV rows (x, phi, density).
void write_profile_csv(std::ostream& os, const FugacityProfile& profile, const ThermoTable& thermo);

}  // namespace zrp
