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

#include "zrp/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "zrp/event_log.hpp"

namespace zrp {

namespace {

ModelParams checked(ModelParams p) {
  p.validate_dynamics();
  return p;
}

}  // namespace

Simulator::Simulator(ModelParams params, Configuration initial, std::uint64_t seed)
    : params_(checked(std::move(params))),
      config_(std::move(initial)),
      rng_(seed),
      tree_(static_cast<std::size_t>(4 + 2 * (params_.n - 2))),
      n_(params_.n),
      n2_(static_cast<double>(params_.n) * params_.n) {
  if (config_.size() != n_) throw ParamError("initial configuration size does not match N");
  const double nt = params_.n_theta();
  inject_left_ = params_.kappa * params_.alpha / nt;
  inject_right_ = params_.kappa * params_.beta / nt;
  remove_left_coef_ = params_.kappa * params_.lambda / nt;
  remove_right_coef_ = params_.kappa * params_.delta / nt;
  for (std::size_t c = 0; c < tree_.size(); ++c) tree_.set(c, expected_weight(c));
}

Channel Simulator::channel(std::size_t c) const {
  switch (c) {
    case 0: return {ChannelClass::inject_left, 1};
    case 1: return {ChannelClass::remove_left, 1};
    case 2: return {ChannelClass::inject_right, n_ - 1};
    case 3: return {ChannelClass::remove_right, n_ - 1};
    default: break;
  }
  const auto k = static_cast<int>(c) - 4;
  if (k < n_ - 2) return {ChannelClass::bulk_right, k + 1};
  return {ChannelClass::bulk_left, k - (n_ - 2) + 2};
}

std::size_t Simulator::channel_index(ChannelClass cls, int site) const {
  switch (cls) {
    case ChannelClass::inject_left: return 0;
    case ChannelClass::remove_left: return 1;
    case ChannelClass::inject_right: return 2;
    case ChannelClass::remove_right: return 3;
    case ChannelClass::bulk_right: return static_cast<std::size_t>(4 + (site - 1));
    case ChannelClass::bulk_left: return static_cast<std::size_t>(4 + (n_ - 2) + (site - 2));
  }
  return 0;
}

double Simulator::expected_weight(std::size_t c) const {
  const auto& g = *params_.rate;
  const Channel ch = channel(c);
  switch (ch.cls) {
    case ChannelClass::inject_left: return inject_left_;
    case ChannelClass::inject_right: return inject_right_;
    case ChannelClass::remove_left: return remove_left_coef_ * g(config_(1));
    case ChannelClass::remove_right: return remove_right_coef_ * g(config_(n_ - 1));
    case ChannelClass::bulk_right:
    case ChannelClass::bulk_left: return g(config_(ch.site));
  }
  return 0.0;
}

double Simulator::max_index_defect() const {
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t c = 0; c < tree_.size(); ++c) {
    const double expect = expected_weight(c);
    scale = std::max(scale, expect);
    const double denom = std::max(std::abs(expect), 1e-300);
    worst = std::max(worst, std::abs(tree_.weight(c) - expect) / denom);
  }
  if (scale > 0.0) worst = std::max(worst, tree_.internal_defect() / std::max(tree_.total(), scale));
  return worst;
}

void Simulator::set_weight(std::size_t c, double w) {
  if (tree_.weight(c) == w) return;
  tree_.set(c, w);
  changed_[n_changed_++] = c;
}

void Simulator::refresh_site(int x) {
  const double rate = (*params_.rate)(config_(x));
  if (x <= n_ - 2) set_weight(channel_index(ChannelClass::bulk_right, x), rate);
  if (x >= 2) set_weight(channel_index(ChannelClass::bulk_left, x), rate);
  if (x == 1) set_weight(1, remove_left_coef_ * rate);
  if (x == n_ - 1) set_weight(3, remove_right_coef_ * rate);
}

void Simulator::apply(std::size_t c) {
  n_changed_ = 0;
  const Channel ch = channel(c);
  switch (ch.cls) {
    case ChannelClass::bulk_right:
      config_.move(ch.site, ch.site + 1);
      refresh_site(ch.site);
      refresh_site(ch.site + 1);
      break;
    case ChannelClass::bulk_left:
      config_.move(ch.site, ch.site - 1);
      refresh_site(ch.site);
      refresh_site(ch.site - 1);
      break;
    case ChannelClass::inject_left:
      config_.add(1);
      ++counters_.injected_left;
      refresh_site(1);
      break;
    case ChannelClass::remove_left:
      config_.remove(1);
      ++counters_.removed_left;
      refresh_site(1);
      break;
    case ChannelClass::inject_right:
      config_.add(n_ - 1);
      ++counters_.injected_right;
      refresh_site(n_ - 1);
      break;
    case ChannelClass::remove_right:
      config_.remove(n_ - 1);
      ++counters_.removed_right;
      refresh_site(n_ - 1);
      break;
  }
}

EventRecord Simulator::step() {
  const double total = tree_.total();
  if (!(total > 0.0)) throw AbsorbingState();
  if (std::isnan(pending_)) pending_ = time_ + rng_.exponential(n2_ * total);
  const std::size_t c = tree_.find(rng_.uniform() * total);
  const double dt = pending_ - time_;
  time_ = pending_;
  pending_ = std::numeric_limits<double>::quiet_NaN();
  apply(c);
  const Channel ch = channel(c);
  EventRecord rec{events_, time_, dt, c, ch.cls, ch.site};
  ++events_;
  if (log_ != nullptr) log_->write(rec);
  return rec;
}

void Simulator::advance_to(double t, std::span<Observer* const> observers) {
  for (;;) {
    const double total = tree_.total();
    if (!(total > 0.0)) {
      for (auto* o : observers) o->on_advance(*this, time_, t);
      time_ = t;
      return;
    }
    if (std::isnan(pending_)) pending_ = time_ + rng_.exponential(n2_ * total);
    if (pending_ > t) {
      for (auto* o : observers) o->on_advance(*this, time_, t);
      time_ = t;
      return;
    }
    if (events_ >= budget_)
      throw EventBudgetExceeded("event budget of " + std::to_string(budget_) + " events exhausted at t = " +
                                std::to_string(time_));
    for (auto* o : observers) o->on_advance(*this, time_, pending_);
    const EventRecord rec = step();
    for (auto* o : observers) o->on_event(*this, rec);
  }
}

RunSummary Simulator::run(double t_end, std::span<Observer* const> observers, std::span<const double> checkpoints) {
  if (!(t_end >= time_)) throw std::invalid_argument("run: t_end is before the current time");
  RunSummary summary{0, time_, time_};
  const std::uint64_t start_events = events_;
  std::vector<double> stops(checkpoints.begin(), checkpoints.end());
  std::sort(stops.begin(), stops.end());
  for (double c : stops) {
    if (c <= time_ || c > t_end) continue;
    advance_to(c, observers);
    for (auto* o : observers) o->on_checkpoint(*this, c);
  }
  if (t_end > time_) advance_to(t_end, observers);
  summary.events = events_ - start_events;
  summary.end_time = time_;
  return summary;
}

}  // namespace zrp
