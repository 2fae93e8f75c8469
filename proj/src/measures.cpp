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

#include "zrp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "zrp/csv.hpp"

namespace zrp {

double ModelParams::n_theta() const { return std::pow(static_cast<double>(n), theta); }

std::array<double, 2> ModelParams::ness_ratios() const {
  const double nt = n_theta();
  const double den = lambda * delta * (n - 2) + (lambda + delta) * nt;
  return {(alpha * delta * (n - 2) + (alpha + beta) * nt) / den,
          (beta * lambda * (n - 2) + (alpha + beta) * nt) / den};
}

void ModelParams::validate_dynamics() const {
  if (n < 3) throw ParamError("N must be at least 3");
  if (!(theta >= 1.0)) throw ParamError("theta must be >= 1");
  if (!(kappa > 0.0)) throw ParamError("kappa must be > 0");
  if (!(alpha >= 0.0 && beta >= 0.0 && lambda >= 0.0 && delta >= 0.0))
    throw ParamError("reservoir rates alpha, beta, lambda, delta must be >= 0");
  if (!rate) throw ParamError("model has no jump rate");
}

void ModelParams::validate() const {
  validate_dynamics();
  if (lambda + delta == 0.0) throw ParamError("stationary state needs lambda + delta > 0");
  const double phi_star = radius_of_convergence(*rate);
  const auto ratios = ness_ratios();
  static constexpr const char* kNames[] = {"left ratio (alpha*delta*(N-2)+(alpha+beta)N^theta)/D",
                                           "right ratio (beta*lambda*(N-2)+(alpha+beta)N^theta)/D"};
  for (int i = 0; i < 2; ++i) {
    if (!(ratios[i] < phi_star)) {
      std::ostringstream os;
      os << "stationary-state condition violated: " << kNames[i] << " = " << ratios[i]
         << " is not below phi* = " << phi_star;
      throw ParamError(os.str());
    }
  }
}

double FugacityProfile::max() const { return *std::max_element(values.begin(), values.end()); }
double FugacityProfile::min() const { return *std::min_element(values.begin(), values.end()); }

FugacityProfile homogeneous_profile(int n, double phi) {
  if (n < 2) throw ParamError("profile size must be at least 2");
  if (!(phi >= 0.0)) throw ParamError("fugacity must be non-negative");
  std::ostringstream os;
  os << "homogeneous(" << phi << ")";
  return {n, std::vector<double>(static_cast<std::size_t>(n - 1), phi), FugacityProfile::Source::homogeneous,
          os.str()};
}

FugacityProfile ness_fugacity(const ModelParams& p) {
  p.validate();
  const double nt = p.n_theta();
  const double den = p.lambda * p.delta * (p.n - 2) + (p.lambda + p.delta) * nt;
  const double slope = -(p.alpha * p.delta - p.beta * p.lambda);
  const double base = p.alpha * p.delta * (p.n - 2) + (p.alpha + p.beta) * nt;
  FugacityProfile profile{p.n, {}, FugacityProfile::Source::ness, "ness"};
  profile.values.resize(static_cast<std::size_t>(p.n - 1));
  for (int x = 1; x <= p.n - 1; ++x) profile.values[static_cast<std::size_t>(x - 1)] = (slope * (x - 1) + base) / den;
  return profile;
}

FugacityProfile density_profile(int n, const ThermoTable& thermo, const std::function<double(double)>& gamma,
                                std::string description) {
  if (n < 2) throw ParamError("profile size must be at least 2");
  FugacityProfile profile{n, {}, FugacityProfile::Source::density_profile, std::move(description)};
  profile.values.resize(static_cast<std::size_t>(n - 1));
  for (int x = 1; x <= n - 1; ++x) {
    const double rho = gamma(static_cast<double>(x) / n);
    if (!(rho >= 0.0)) throw ParamError("density profile must be non-negative");
    profile.values[static_cast<std::size_t>(x - 1)] = thermo.flux(rho);
  }
  return profile;
}

AsymptoticProfile asymptotic_profile(const ModelParams& p, const ThermoTable& thermo, double u) {
  if (!(p.alpha > 0.0 && p.beta > 0.0 && p.lambda > 0.0 && p.delta > 0.0))
    throw ParamError("asymptotic profile needs alpha, beta, lambda, delta > 0");
  if (!(u >= 0.0 && u <= 1.0)) throw ParamError("u must lie in [0, 1]");
  if (!(p.theta >= 1.0)) throw ParamError("asymptotic profile is available for theta >= 1");
  double phi;
  if (p.theta == 1.0) {
    phi = (-(p.alpha * p.delta - p.beta * p.lambda) * u + p.alpha * p.delta + p.alpha + p.beta) /
          (p.lambda * p.delta + p.lambda + p.delta);
  } else {
    phi = (p.alpha + p.beta) / (p.lambda + p.delta);
  }
  return {phi, thermo.mean_density(phi)};
}

MarginalSampler::MarginalSampler(const ThermoTable& thermo, double phi) : phi_(phi) {
  const double z = thermo.partition_function(phi);
  const JumpRate& g = thermo.rate();
  double term = 1.0;
  double cum = 1.0;
  cdf_.push_back(cum);
  const double target = z * (1.0 - kTailMass);
  for (std::uint64_t k = 1; cum < target; ++k) {
    if (k > ThermoTable::kMaxTerms) throw ThermoError("truncation cap reached while sampling marginal");
    term *= phi / g(k);
    if (term == 0.0) break;
    cum += term;
    cdf_.push_back(cum);
  }
}

std::uint32_t MarginalSampler::quantile(double u) const {
  const double target = u * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  const auto k = static_cast<std::size_t>(it - cdf_.begin());
  return static_cast<std::uint32_t>(std::min(k, cdf_.size() - 1));
}

double MarginalSampler::probability(std::uint64_t k) const {
  if (k >= cdf_.size()) return 0.0;
  const double prev = k == 0 ? 0.0 : cdf_[k - 1];
  return (cdf_[k] - prev) / cdf_.back();
}

ProductSampler::ProductSampler(const FugacityProfile& profile, const ThermoTable& thermo) : n_(profile.n) {
  std::map<double, std::size_t> index;
  site_to_sampler_.reserve(profile.values.size());
  for (double phi : profile.values) {
    auto [it, inserted] = index.emplace(phi, distinct_.size());
    if (inserted) distinct_.emplace_back(thermo, phi);
    site_to_sampler_.push_back(it->second);
  }
}

const MarginalSampler& ProductSampler::marginal(int x) const {
  return distinct_[site_to_sampler_.at(static_cast<std::size_t>(x - 1))];
}

Configuration ProductSampler::sample(Rng& rng) const {
  std::vector<std::uint32_t> occ(site_to_sampler_.size());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = distinct_[site_to_sampler_[i]].sample(rng);
  return Configuration(n_, std::move(occ));
}

Configuration ProductSampler::quantile(std::span<const double> uniforms) const {
  if (uniforms.size() != site_to_sampler_.size()) throw std::invalid_argument("one uniform per site required");
  std::vector<std::uint32_t> occ(site_to_sampler_.size());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = distinct_[site_to_sampler_[i]].quantile(uniforms[i]);
  return Configuration(n_, std::move(occ));
}

Configuration sample_product(const FugacityProfile& profile, const ThermoTable& thermo, std::uint64_t seed) {
  Rng rng(seed);
  return ProductSampler(profile, thermo).sample(rng);
}

std::pair<Configuration, Configuration> sample_monotone_pair(const ProductSampler& lower, const ProductSampler& upper,
                                                             Rng& rng) {
  if (lower.size() != upper.size()) throw std::invalid_argument("coupled samplers differ in size");
  std::vector<double> u(static_cast<std::size_t>(lower.size() - 1));
  for (auto& v : u) v = rng.uniform();
  return {lower.quantile(u), upper.quantile(u)};
}

namespace {

double marginal_kl(const ThermoTable& thermo, double phi_mu, double phi_nu) {
  if (phi_mu == phi_nu) return 0.0;
  if (phi_nu == 0.0) throw std::domain_error("support mismatch: mu charges k > 0 where nu does not");
  const double log_z_nu = std::log(thermo.partition_function(phi_nu));
  if (phi_mu == 0.0) return log_z_nu;  // μ is the point mass at 0
  const JumpRate& g = thermo.rate();
  const double log_z_mu = std::log(thermo.partition_function(phi_mu));
  const double log_ratio = std::log(phi_mu / phi_nu);
  // p_μ(k) log(p_μ(k)/p_ν(k)) with log(p_μ/p_ν) = k log(φ_μ/φ_ν) - log Z_μ + log Z_ν.
  const MarginalSampler support(thermo, phi_mu);
  double kl = 0.0;
  for (std::uint64_t k = 0; k < support.support_size(); ++k) {
    const double log_p = static_cast<double>(k) * std::log(phi_mu) - g.log_factorial(k) - log_z_mu;
    const double p = std::exp(log_p);
    kl += p * (static_cast<double>(k) * log_ratio - log_z_mu + log_z_nu);
  }
  return std::max(kl, 0.0);
}

}  // namespace

double relative_entropy(const FugacityProfile& mu, const FugacityProfile& nu, const ThermoTable& thermo) {
  if (mu.n != nu.n) throw std::invalid_argument("relative entropy of profiles with different N");
  std::map<std::pair<double, double>, double> cache;
  double h = 0.0;
  for (std::size_t i = 0; i < mu.values.size(); ++i) {
    const auto key = std::make_pair(mu.values[i], nu.values[i]);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, marginal_kl(thermo, key.first, key.second)).first;
    h += it->second;
  }
  return h;
}

bool dominates(const FugacityProfile& mu, const FugacityProfile& nu) {
  if (mu.n != nu.n) throw std::invalid_argument("domination check of profiles with different N");
  for (std::size_t i = 0; i < mu.values.size(); ++i)
    if (mu.values[i] > nu.values[i]) return false;
  return true;
}

void write_profile_csv(std::ostream& os, const FugacityProfile& profile, const ThermoTable& thermo) {
  CsvWriter csv(os, {"x", "phi", "density"});
  for (int x = 1; x <= profile.n - 1; ++x) csv.row(x, profile(x), thermo.mean_density(profile(x)));
}

}  // namespace zrp
