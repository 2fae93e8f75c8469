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
#include <span>
#include <stdexcept>
#include <vector>

#include "zrp/channel_tree.hpp"
#include "zrp/configuration.hpp"
#include "zrp/measures.hpp"
#include "zrp/random.hpp"

namespace zrp {

class AbsorbingState : public std::runtime_error {
 public:
  AbsorbingState() : std::runtime_error("absorbing state: total rate is zero") {}
};

class EventBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wire values of the event-log channel class byte.
enum class ChannelClass : std::uint8_t {
  bulk_right = 0,
  bulk_left = 1,
  inject_left = 2,
  remove_left = 3,
  inject_right = 4,
  remove_right = 5,
};

struct Channel {
  ChannelClass cls;
  int site;  // departure site for bulk moves, boundary site otherwise
};

struct EventRecord {
  std::uint64_t index;  // 0-based event counter
  double time;          // macroscopic time of the event
  double dt;            // holding time before it
  std::size_t channel;
  ChannelClass cls;
  int site;
};

/// Particles created and destroyed at each reservoir.
struct BoundaryCounters {
  std::uint64_t injected_left = 0;
  std::uint64_t removed_left = 0;
  std::uint64_t injected_right = 0;
  std::uint64_t removed_right = 0;

  std::uint64_t injected() const { return injected_left + injected_right; }
};

struct RunSummary {
  std::uint64_t events = 0;
  double start_time = 0.0;
  double end_time = 0.0;
};

class Simulator;
class EventLogWriter;

/// Hooks into Simulator::run. The configuration is constant on every
/// interval passed to on_advance.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_advance(const Simulator&, double /*from*/, double /*to*/) {}
  virtual void on_event(const Simulator&, const EventRecord&) {}
  virtual void on_checkpoint(const Simulator&, double /*t*/) {}
};

/// Exact event-driven simulation of the open zero-range process with
/// generator N²(L_bulk + κ L_boundary); time is macroscopic.
///
/// Channels: 0 inject left, 1 remove left, 2 inject right, 3 remove right,
/// then the right moves of sites 1..N-2 and the left moves of sites 2..N-1.
/// Stored weights omit the N² factor.
class Simulator {
 public:
  static constexpr std::uint64_t kDefaultEventBudget = 1'000'000'000ULL;

  Simulator(ModelParams params, Configuration initial, std::uint64_t seed);

  const ModelParams& params() const { return params_; }
  const Configuration& config() const { return config_; }
  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  const BoundaryCounters& counters() const { return counters_; }

  /// N² × sum of channel weights.
  double total_rate() const { return n2_ * tree_.total(); }
  std::size_t channel_count() const { return tree_.size(); }
  double channel_weight(std::size_t c) const { return tree_.weight(c); }
  Channel channel(std::size_t c) const;
  std::size_t channel_index(ChannelClass cls, int site) const;
  /// Weight of channel c recomputed from the current configuration.
  double expected_weight(std::size_t c) const;
  /// Largest relative difference between stored and recomputed weights,
  /// including the internal sums of the index.
  double max_index_defect() const;
  /// Channels whose weights changed in the last event.
  std::span<const std::size_t> last_changed() const { return {changed_.data(), n_changed_}; }

  void set_event_budget(std::uint64_t budget) { budget_ = budget; }
  void set_event_log(EventLogWriter* log) { log_ = log; }

  /// Executes the next event. Throws AbsorbingState if no channel is live.
  EventRecord step();

  /// Advances to t_end, calling observers on every holding interval and
  /// event, and on_checkpoint at each checkpoint in (time(), t_end].
  /// The state at t_end is exact: the pending event time is kept across
  /// calls, so splitting a run does not change the trajectory.
  RunSummary run(double t_end, std::span<Observer* const> observers = {},
                 std::span<const double> checkpoints = {});

 private:
  void refresh_site(int x);
  void set_weight(std::size_t c, double w);
  void apply(std::size_t c);
  void advance_to(double t, std::span<Observer* const> observers);

  ModelParams params_;
  Configuration config_;
  Rng rng_;
  ChannelTree tree_;
  int n_;
  double n2_;
  double inject_left_, inject_right_, remove_left_coef_, remove_right_coef_;
  double time_ = 0.0;
  double pending_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t events_ = 0;
  std::uint64_t budget_ = kDefaultEventBudget;
  BoundaryCounters counters_;
  std::array<std::size_t, 8> changed_{};
  std::size_t n_changed_ = 0;
  EventLogWriter* log_ = nullptr;
};

}  // namespace zrp
