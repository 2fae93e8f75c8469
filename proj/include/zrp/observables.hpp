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

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/event_log.hpp"
#include "zrp/simulator.hpp"

namespace zrp {

using SpaceFunction = std::function<double(double)>;

/// ⟨π, H⟩ = (1/N) Σ_x η(x) H(x/N).
double empirical_pairing(const Configuration& c, const SpaceFunction& h);

enum class BlockKind { centered, right, left };

/// Block averages of η around x with half-width (or length) ℓ.
/// Throws std::out_of_range if the window leaves {1, ..., N-1}.
double block_average(const Configuration& c, int x, int ell, BlockKind kind);

/// Σ_x (centered block average)² over the x whose window fits; monotone in η.
double block_energy(const Configuration& c, int ell);

/// Tracks the Dynkin martingale M_t(G) = ⟨π_t,G⟩ - ⟨π_0,G⟩ - ∫ N²L⟨π_s,G⟩ ds
/// and ∫ B(G)_s ds online. The compensator and B are kept as channel sums
/// N² Σ_c w_c Δ_c and N² Σ_c w_c Δ_c², where Δ_c is the change of ⟨π,G⟩
/// caused by channel c, and are updated only on the channels an event touched.
class DynkinTracker : public Observer {
 public:
  DynkinTracker(const Simulator& sim, SpaceFunction g);

  void on_advance(const Simulator&, double from, double to) override;
  void on_event(const Simulator& sim, const EventRecord& rec) override;

  double pairing() const { return pairing_; }
  double martingale() const { return pairing_ - pairing0_ - compensator_integral_; }
  double compensator_integral() const { return compensator_integral_; }
  double quadratic_variation_integral() const { return qv_integral_; }
  /// Current compensator value N²L⟨π,G⟩.
  double compensator() const { return compensator_; }
  double quadratic_rate() const { return quadratic_; }

 private:
  void recompute(const Simulator& sim);

  double n2_;
  std::vector<double> delta_;
  std::vector<double> weights_;
  double pairing0_ = 0.0;
  double pairing_ = 0.0;
  double compensator_ = 0.0;
  double quadratic_ = 0.0;
  double compensator_integral_ = 0.0;
  double qv_integral_ = 0.0;
  std::uint64_t since_recompute_ = 0;
};

struct DynkinResult {
  double martingale;
  double compensator_integral;
  double qv_integral;
};

/// N²L⟨π,G⟩ written with the discrete Laplacian and one-sided gradients.
double dynkin_compensator(const ModelParams& p, const Configuration& c, const SpaceFunction& g);
/// B(G) from the explicit quadratic-variation density.
double dynkin_quadratic_rate(const ModelParams& p, const Configuration& c, const SpaceFunction& g);

/// Rebuilds M_T(G) and ∫B ds from an initial configuration and an event
/// log, evaluating the closed-form compensator on every holding interval.
DynkinResult dynkin_replay(const ModelParams& p, Configuration initial, const std::vector<LoggedEvent>& events,
                           const SpaceFunction& g, double t_end);

/// Exact time integral of η(x) per site.
class OccupationIntegrator : public Observer {
 public:
  explicit OccupationIntegrator(const Simulator& sim);
  void on_event(const Simulator& sim, const EventRecord& rec) override;
  /// Integrals ∫_{t0}^{t} η_s(x) ds for x = 1..N-1 (index x - 1).
  std::vector<double> integrals(const Simulator& sim) const;
  double start_time() const { return t0_; }

 private:
  void flush(int x, double t, std::uint32_t now);

  double t0_;
  std::vector<double> acc_;
  std::vector<double> since_;
  std::vector<std::uint32_t> occ_;
};

/// Stores the configuration at each checkpoint.
class SnapshotRecorder : public Observer {
 public:
  void on_checkpoint(const Simulator& sim, double t) override { snapshots_.emplace_back(t, sim.config()); }
  const std::vector<std::pair<double, Configuration>>& snapshots() const { return snapshots_; }

 private:
  std::vector<std::pair<double, Configuration>> snapshots_;
};

/// A function of η depending only on the sites in `support`.
struct CylinderFunction {
  std::string name;
  std::vector<int> support;
  std::function<double(const Configuration&)> eval;
};

/// (L f)(η) for the unaccelerated generator L_bulk + κ L_boundary, summing
/// only channels that move a particle into or out of supp f. `scratch` is
/// modified during evaluation and restored before returning.
double apply_generator(const ModelParams& p, Configuration& scratch, const CylinderFunction& f);

/// Checkpoint CSV rows (replica, t, x, eta).
void write_checkpoint_rows(std::ostream& os, int replica, double t, const Configuration& c);

}  // namespace zrp
