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

#include "zrp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "zrp/csv.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/observables.hpp"

namespace zrp {

namespace {

ModelParams checked(ModelParams p) {
  p.validate_dynamics();
  return p;
}

struct Split {
  double joint, lower, upper;
};

Split split(double a, double b) { return {std::min(a, b), std::max(a - b, 0.0), std::max(b - a, 0.0)}; }

double pick(const Split& s, Mover m) {
  switch (m) {
    case Mover::both: return s.joint;
    case Mover::lower: return s.lower;
    case Mover::upper: return s.upper;
  }
  return 0.0;
}

}  // namespace

CoupledSimulator::CoupledSimulator(ModelParams params, Configuration lower, Configuration upper, std::uint64_t seed)
    : params_(checked(std::move(params))),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      rng_(seed),
      tree_(static_cast<std::size_t>(8 + 3 * 2 * (params_.n - 2))),
      n_(params_.n),
      n2_(static_cast<double>(params_.n) * params_.n) {
  if (lower_.size() != n_ || upper_.size() != n_) throw ParamError("coupled configurations must have size N");
  const double nt = params_.n_theta();
  inject_left_ = params_.kappa * params_.alpha / nt;
  inject_right_ = params_.kappa * params_.beta / nt;
  remove_left_coef_ = params_.kappa * params_.lambda / nt;
  remove_right_coef_ = params_.kappa * params_.delta / nt;
  ordered_ = lower_.below(upper_);
  for (std::size_t c = 0; c < tree_.size(); ++c) tree_.set(c, expected_weight(c));
}

CoupledSimulator::Decoded CoupledSimulator::decode(std::size_t c) const {
  switch (c) {
    case 0: return {Mover::both, ChannelClass::inject_left, 1};
    case 1: case 2: case 3: return {static_cast<Mover>(c - 1), ChannelClass::remove_left, 1};
    case 4: return {Mover::both, ChannelClass::inject_right, n_ - 1};
    case 5: case 6: case 7: return {static_cast<Mover>(c - 5), ChannelClass::remove_right, n_ - 1};
    default: break;
  }
  const auto e = static_cast<int>((c - 8) / 3);
  const auto m = static_cast<Mover>((c - 8) % 3);
  if (e < n_ - 2) return {m, ChannelClass::bulk_right, e + 1};
  return {m, ChannelClass::bulk_left, e - (n_ - 2) + 2};
}

std::size_t CoupledSimulator::edge_base(ChannelClass cls, int site) const {
  const int e = cls == ChannelClass::bulk_right ? site - 1 : (n_ - 2) + (site - 2);
  return static_cast<std::size_t>(8 + 3 * e);
}

double CoupledSimulator::expected_weight(std::size_t c) const {
  const auto& g = *params_.rate;
  const Decoded d = decode(c);
  switch (d.cls) {
    case ChannelClass::inject_left: return inject_left_;
    case ChannelClass::inject_right: return inject_right_;
    case ChannelClass::remove_left:
      return remove_left_coef_ * pick(split(g(lower_(1)), g(upper_(1))), d.mover);
    case ChannelClass::remove_right:
      return remove_right_coef_ * pick(split(g(lower_(n_ - 1)), g(upper_(n_ - 1))), d.mover);
    case ChannelClass::bulk_right:
    case ChannelClass::bulk_left: return pick(split(g(lower_(d.site)), g(upper_(d.site))), d.mover);
  }
  return 0.0;
}

double CoupledSimulator::max_index_defect() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < tree_.size(); ++c) {
    const double expect = expected_weight(c);
    worst = std::max(worst, std::abs(tree_.weight(c) - expect) / std::max(std::abs(expect), 1e-300));
  }
  if (tree_.total() > 0.0) worst = std::max(worst, tree_.internal_defect() / tree_.total());
  return worst;
}

std::uint32_t CoupledSimulator::max_excess() const {
  std::uint32_t worst = 0;
  for (int x = 1; x <= n_ - 1; ++x)
    if (lower_(x) > upper_(x)) worst = std::max(worst, lower_(x) - upper_(x));
  return worst;
}

void CoupledSimulator::refresh_site(int x) {
  const auto& g = *params_.rate;
  const Split s = split(g(lower_(x)), g(upper_(x)));
  const auto put = [&](std::size_t base, double scale) {
    tree_.set(base, scale * s.joint);
    tree_.set(base + 1, scale * s.lower);
    tree_.set(base + 2, scale * s.upper);
  };
  if (x <= n_ - 2) put(edge_base(ChannelClass::bulk_right, x), 1.0);
  if (x >= 2) put(edge_base(ChannelClass::bulk_left, x), 1.0);
  if (x == 1) put(1, remove_left_coef_);
  if (x == n_ - 1) put(5, remove_right_coef_);
}

void CoupledSimulator::check_site(int x) const {
  if (lower_(x) > upper_(x))
    throw OrderViolation("coupled order broken at site " + std::to_string(x) + " after event " +
                         std::to_string(events_) + ": lower " + std::to_string(lower_(x)) + " > upper " +
                         std::to_string(upper_(x)));
}

void CoupledSimulator::full_scan() {
  ++full_scans_;
  for (int x = 1; x <= n_ - 1; ++x) check_site(x);
}

CoupledEvent CoupledSimulator::step() {
  const double total = tree_.total();
  if (!(total > 0.0)) throw AbsorbingState();
  if (std::isnan(pending_)) pending_ = time_ + rng_.exponential(n2_ * total);
  const std::size_t c = tree_.find(rng_.uniform() * total);
  time_ = pending_;
  pending_ = std::numeric_limits<double>::quiet_NaN();

  const Decoded d = decode(c);
  const bool lo = d.mover != Mover::upper;
  const bool up = d.mover != Mover::lower;
  int other = 0;
  switch (d.cls) {
    case ChannelClass::bulk_right:
    case ChannelClass::bulk_left:
      other = d.cls == ChannelClass::bulk_right ? d.site + 1 : d.site - 1;
      if (lo) lower_.move(d.site, other);
      if (up) upper_.move(d.site, other);
      break;
    case ChannelClass::inject_left:
    case ChannelClass::inject_right:
      lower_.add(d.site);
      upper_.add(d.site);
      break;
    case ChannelClass::remove_left:
    case ChannelClass::remove_right:
      if (lo) lower_.remove(d.site);
      if (up) upper_.remove(d.site);
      break;
  }
  refresh_site(d.site);
  if (other != 0) refresh_site(other);
  if (ordered_) {
    check_site(d.site);
    if (other != 0) check_site(other);
  }
  CoupledEvent ev{events_, time_, c, d.mover, d.cls, d.site};
  ++events_;
  if (ordered_ && events_ % kFullScanInterval == 0) full_scan();
  return ev;
}

void CoupledSimulator::advance_to(double t) {
  for (;;) {
    const double total = tree_.total();
    if (!(total > 0.0)) {
      time_ = t;
      return;
    }
    if (std::isnan(pending_)) pending_ = time_ + rng_.exponential(n2_ * total);
    if (pending_ > t) {
      time_ = t;
      return;
    }
    step();
  }
}

void CoupledSimulator::run(double t_end, std::span<const double> checkpoints,
                           const std::function<void(const CoupledSimulator&, double)>& on_checkpoint) {
  if (!(t_end >= time_)) throw std::invalid_argument("run: t_end is before the current time");
  std::vector<double> stops(checkpoints.begin(), checkpoints.end());
  std::sort(stops.begin(), stops.end());
  for (double c : stops) {
    if (c <= time_ || c > t_end) continue;
    advance_to(c);
    if (on_checkpoint) on_checkpoint(*this, c);
  }
  if (t_end > time_) advance_to(t_end);
}

DominationReport domination_experiment(const FugacityProfile& mu, const ModelParams& p, const ThermoTable& thermo,
                                       std::span<const double> checkpoints, int replicas, std::uint64_t seed,
                                       int block, int workers) {
  p.validate();
  if (!p.rate->monotone()) throw ParamError("domination experiment needs a non-decreasing rate");
  if (replicas < 1) throw ParamError("replicas must be positive");
  const FugacityProfile nu = ness_fugacity(p);
  if (mu.n != p.n) throw ParamError("initial profile has the wrong size");
  if (!dominates(mu, nu)) throw ParamError("initial profile is not below the stationary fugacity");
  const ProductSampler lower_sampler(mu, thermo);
  const ProductSampler upper_sampler(nu, thermo);
  std::vector<double> stops(checkpoints.begin(), checkpoints.end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  if (stops.empty()) throw ParamError("domination experiment needs at least one checkpoint");

  struct ReplicaOut {
    std::vector<DominationRow> rows;
  };
  const auto task = [&](std::size_t r) {
    Rng init(derive_seed(seed, 2 * r));
    auto [lo, up] = sample_monotone_pair(lower_sampler, upper_sampler, init);
    CoupledSimulator sim(p, std::move(lo), std::move(up), derive_seed(seed, 2 * r + 1));
    ReplicaOut out;
    const auto record = [&](const CoupledSimulator& s, double t) {
      out.rows.push_back({static_cast<int>(r), t, s.max_excess(), block_energy(s.lower(), block),
                          block_energy(s.upper(), block)});
    };
    if (stops.front() == 0.0) record(sim, 0.0);
    sim.run(stops.back(), stops, record);
    return out;
  };
  const auto outs = run_replicas<ReplicaOut>(static_cast<std::size_t>(replicas), task, workers);

  DominationReport report;
  for (const auto& o : outs) report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
  for (double t : stops) {
    double sum = 0.0;
    double sum2 = 0.0;
    int count = 0;
    std::uint32_t worst = 0;
    for (const auto& row : report.rows) {
      if (row.t != t) continue;
      const double gap = row.f_upper - row.f_lower;
      sum += gap;
      sum2 += gap * gap;
      ++count;
      worst = std::max(worst, row.max_excess);
    }
    const double mean = sum / count;
    const double var = count > 1 ? std::max(0.0, (sum2 - count * mean * mean) / (count - 1)) : 0.0;
    report.summary.push_back({t, mean, std::sqrt(var / count), worst});
    if (worst > 0) report.order_preserved = false;
  }
  return report;
}

void write_domination_csv(std::ostream& os, const DominationReport& report) {
  CsvWriter csv(os, {"replica", "t", "max_excess", "f_lower", "f_upper"});
  for (const auto& r : report.rows) csv.row(r.replica, r.t, r.max_excess, r.f_lower, r.f_upper);
}

}  // namespace zrp
