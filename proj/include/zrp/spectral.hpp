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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zrp/rates.hpp"

namespace zrp {

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All occupations of `sites` sites holding exactly `particles` particles,
/// in descending lexicographic order: (j,0,..,0) first, (0,..,0,j) last.
class CanonicalSpace {
 public:
  static constexpr std::size_t kMaxStates = 200'000;

  CanonicalSpace(int sites, int particles);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  std::size_t size() const { return size_; }
  std::span<const std::uint16_t> state(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(sites_), static_cast<std::size_t>(sites_)};
  }
  /// Ordinal of a state; the state must sum to particles().
  std::size_t index(std::span<const std::uint16_t> s) const;

  /// Number of states of `sites` sites with `particles` particles.
  static double count(int sites, int particles);

 private:
  std::size_t ways(int sites, int particles) const {
    return table_[static_cast<std::size_t>(sites) * (particles_ + 1) + particles];
  }

  int sites_;
  int particles_;
  std::size_t size_;
  std::vector<std::size_t> table_;  // ways(s, r), s <= sites, r <= particles
  std::vector<std::uint16_t> data_;
};

CanonicalSpace enumerate_canonical(int sites, int particles);

/// Generator of a closed zero-range process on a canonical shell, stored
/// as off-diagonal entries; diag[a] = -Σ_b rate(a -> b).
class GeneratorMatrix {
 public:
  struct Entry {
    std::uint32_t from;
    std::uint32_t to;
    double rate;
  };

  GeneratorMatrix(CanonicalSpace space, std::vector<Entry> entries, std::vector<double> log_weights);

  const CanonicalSpace& space() const { return space_; }
  std::size_t dimension() const { return space_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<double>& diagonal() const { return diag_; }
  /// Normalized canonical weights μ(a) and their logs.
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& log_weights() const { return log_weights_; }

  /// max_a |Σ_b G_ab| (zero by construction up to rounding).
  double row_sum_defect() const;
  /// max |μ(a)G_ab - μ(b)G_ba| / max(μ(a)G_ab, μ(b)G_ba); entries without a
  /// reverse count as full defects.
  double detailed_balance_defect() const;
  /// True iff the transition graph is strongly connected.
  bool irreducible() const;

  Eigen::MatrixXd dense() const;
  /// S = D^{1/2}(-G)D^{-1/2}, assembled as S_ab = -sqrt(G_ab G_ba).
  Eigen::MatrixXd symmetrized() const;
  /// max |D^{1/2}(-G)D^{-1/2} - S| elementwise, computed entry by entry from
  /// the weights (tests the symmetrization against the closed form).
  double symmetrization_defect() const;
  /// y = S x without forming S.
  void apply_symmetrized(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

 private:
  CanonicalSpace space_;
  std::vector<Entry> entries_;
  std::vector<double> diag_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
  std::vector<double> sym_;  // -sqrt(G_ab G_ba) per entry
};

/// Closed box {1..ℓ}, nearest-neighbour jumps at rate g(η(x)) each way.
GeneratorMatrix build_single_box(int ell, int particles, const JumpRate& g);

/// Two boxes of ℓ sites each plus bridge jumps between their first sites.
/// Box one occupies coordinates 0..ℓ-1, box two ℓ..2ℓ-1.
GeneratorMatrix build_coupled(int ell, int particles, const JumpRate& g);

struct GapResult {
  double gap;
  bool iterative;
  int iterations;  // Lanczos steps (0 for the dense path)
};

/// Smallest nonzero eigenvalue of -G. Dense for dimension <= dense_limit,
/// otherwise Lanczos with full reorthogonalization on the complement of
/// sqrt(μ). Returns +inf for a one-state shell (every function is
/// constant). Throws SpectralError if the chain is reducible.
GapResult spectral_gap_detail(const GeneratorMatrix& g, std::size_t dense_limit = 3000);
double spectral_gap(const GeneratorMatrix& g);

/// Lower bound for the coupled gap from the split of the shell into level
/// sets of N1 (particles in box one). With γ_min the smallest within-level
/// gap, γ̄ the gap of the projected N1 chain and γ the largest rate of
/// leaving a level set, gap ≥ min{γ̄/3, γ̄ γ_min / (3γ + γ̄)}.
struct CoupledGapBound {
  double coupled_gap;
  double box_min;    // γ_min: min over k of gap(ℓ,k), nontrivial shells (+inf if none)
  double bridge;     // γ̄
  double exit_rate;  // γ = max over states of g(η(1)) + g(η(w))
  double heuristic;  // g(1) min_{l>=1} π_j(l) / j
  double bound() const;
  /// min{box_min, heuristic}: the constant the two-level variance argument
  /// suggests; not a proven bound, kept for comparison.
  double heuristic_bound() const { return box_min < heuristic ? box_min : heuristic; }
};
CoupledGapBound coupled_gap_bound(int ell, int particles, const JumpRate& g);

struct VarianceSplit {
  double total;
  double within;   // E[Var(f | N1)]
  double between;  // Var(E[f | N1])
  double defect() const { return total - within - between; }
};

/// Law of total variance on a coupled shell with N1 = particles in box one.
VarianceSplit variance_split(const GeneratorMatrix& coupled, int ell, std::span<const double> f);

/// Max |defect| over `trials` random Gaussian functions on the coupled shell.
double total_variance_decomposition_check(int ell, int particles, const JumpRate& g, int trials,
                                          std::uint64_t seed);

struct GapScanRow {
  std::string rate;
  int ell;
  int particles;
  std::size_t dimension;
  double gap;
  double scaled() const { return gap * ell * ell; }
};

/// Single-box gaps for every (rate, ℓ, j); (ℓ, j) pairs run in parallel.
std::vector<GapScanRow> gap_scan(std::span<const RatePtr> rates, std::span<const int> ells,
                                 std::span<const int> particles, int workers = 0);

/// CSV (rate, ell, j, dimension, gap, gap_ell2).
void write_gap_csv(std::ostream& os, std::span<const GapScanRow> rows);

}  // namespace zrp
