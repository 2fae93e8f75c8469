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
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "zrp/channel_tree.hpp"
#include "zrp/configuration.hpp"
#include "zrp/measures.hpp"
#include "zrp/simulator.hpp"

namespace zrp {

/// Raised when the coupled pair leaves {η <= ξ}; indicates a bug.
class OrderViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Which copies a coupled channel moves.
enum class Mover : std::uint8_t { both = 0, lower = 1, upper = 2 };

struct CoupledEvent {
  std::uint64_t index;
  double time;
  std::size_t channel;
  Mover mover;
  ChannelClass cls;
  int site;
};

/// Basic coupling of two copies (η below, ξ above). Joint moves fire at
/// min{g(η(x)), g(ξ(x))}, solo moves at the positive parts of the rate
/// differences; injections are always joint.
///
/// Channels: 0 inject left; 1..3 remove left (both, lower, upper);
/// 4 inject right; 5..7 remove right; then three channels (both, lower,
/// upper) per directed bulk edge in the single-copy edge order.
class CoupledSimulator {
 public:
  static constexpr std::uint64_t kFullScanInterval = 10'000;

  CoupledSimulator(ModelParams params, Configuration lower, Configuration upper, std::uint64_t seed);

  const ModelParams& params() const { return params_; }
  const Configuration& lower() const { return lower_; }
  const Configuration& upper() const { return upper_; }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  /// True if the pair started ordered; order is then asserted on every event.
  bool tracking_order() const { return ordered_; }
  std::uint64_t full_scans() const { return full_scans_; }

  double total_rate() const { return n2_ * tree_.total(); }
  std::size_t channel_count() const { return tree_.size(); }
  double channel_weight(std::size_t c) const { return tree_.weight(c); }
  double expected_weight(std::size_t c) const;
  double max_index_defect() const;

  /// max_x (η(x) - ξ(x))⁺.
  std::uint32_t max_excess() const;

  CoupledEvent step();
  /// Advances to t_end exactly (pending event kept across calls); calls
  /// on_checkpoint at each checkpoint in (time(), t_end].
  void run(double t_end, std::span<const double> checkpoints = {},
           const std::function<void(const CoupledSimulator&, double)>& on_checkpoint = {});

 private:
  struct Decoded {
    Mover mover;
    ChannelClass cls;
    int site;
  };
  Decoded decode(std::size_t c) const;
  std::size_t edge_base(ChannelClass cls, int site) const;
  void refresh_site(int x);
  void check_site(int x) const;
  void full_scan();
  void advance_to(double t);

  ModelParams params_;
  Configuration lower_;
  Configuration upper_;
  Rng rng_;
  ChannelTree tree_;
  int n_;
  double n2_;
  double inject_left_, inject_right_, remove_left_coef_, remove_right_coef_;
  bool ordered_;
  double time_ = 0.0;
  double pending_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t events_ = 0;
  std::uint64_t full_scans_ = 0;
};

struct DominationRow {
  int replica;
  double t;
  std::uint32_t max_excess;
  double f_lower;
  double f_upper;
};

struct DominationSummary {
  double t;
  double mean_gap;  // E[f(ξ_t)] - E[f(η_t)]
  double se_gap;
  std::uint32_t worst_excess;
};

struct DominationReport {
  std::vector<DominationRow> rows;
  std::vector<DominationSummary> summary;
  bool order_preserved = true;
};

/// Couples μ (lower) with the stationary state of p (upper) through shared
/// per-site uniforms, runs the coupled dynamics and records the block
/// energy (half-width `block`) of both copies at every checkpoint.
/// Requires μ <= ν̄_N and a non-decreasing rate; throws ParamError otherwise.
DominationReport domination_experiment(const FugacityProfile& mu, const ModelParams& p, const ThermoTable& thermo,
                                       std::span<const double> checkpoints, int replicas, std::uint64_t seed,
                                       int block = 2, int workers = 0);

/// CSV (replica, t, max_excess, f_lower, f_upper).
void write_domination_csv(std::ostream& os, const DominationReport& report);

}  // namespace zrp
