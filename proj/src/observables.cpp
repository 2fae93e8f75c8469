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

#include "zrp/observables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "zrp/csv.hpp"

namespace zrp {

double empirical_pairing(const Configuration& c, const SpaceFunction& h) {
  const int n = c.size();
  double acc = 0.0;
  for (int x = 1; x <= n - 1; ++x) {
    const auto eta = c(x);
    if (eta != 0) acc += eta * h(static_cast<double>(x) / n);
  }
  return acc / n;
}

double block_average(const Configuration& c, int x, int ell, BlockKind kind) {
  if (ell < 1) throw std::out_of_range("block length must be positive");
  int lo = 0;
  int hi = 0;
  switch (kind) {
    case BlockKind::centered: lo = x - ell; hi = x + ell; break;
    case BlockKind::right: lo = x + 1; hi = x + ell; break;
    case BlockKind::left: lo = x - ell; hi = x - 1; break;
  }
  if (lo < 1 || hi > c.size() - 1) throw std::out_of_range("block window leaves the bulk");
  double acc = 0.0;
  for (int y = lo; y <= hi; ++y) acc += c(y);
  return acc / (hi - lo + 1);
}

double block_energy(const Configuration& c, int ell) {
  double acc = 0.0;
  for (int x = 1 + ell; x <= c.size() - 1 - ell; ++x) {
    const double b = block_average(c, x, ell, BlockKind::centered);
    acc += b * b;
  }
  return acc;
}

namespace {

// Change of ⟨π,G⟩ caused by one event on channel c.
double channel_delta(const Simulator& sim, std::size_t c, const SpaceFunction& g) {
  const int n = sim.params().n;
  const auto at = [&](int x) { return g(static_cast<double>(x) / n); };
  const Channel ch = sim.channel(c);
  switch (ch.cls) {
    case ChannelClass::bulk_right: return (at(ch.site + 1) - at(ch.site)) / n;
    case ChannelClass::bulk_left: return (at(ch.site - 1) - at(ch.site)) / n;
    case ChannelClass::inject_left:
    case ChannelClass::inject_right: return at(ch.site) / n;
    case ChannelClass::remove_left:
    case ChannelClass::remove_right: return -at(ch.site) / n;
  }
  return 0.0;
}

}  // namespace

DynkinTracker::DynkinTracker(const Simulator& sim, SpaceFunction g)
    : n2_(static_cast<double>(sim.params().n) * sim.params().n) {
  delta_.resize(sim.channel_count());
  weights_.resize(sim.channel_count());
  for (std::size_t c = 0; c < delta_.size(); ++c) delta_[c] = channel_delta(sim, c, g);
  pairing0_ = pairing_ = empirical_pairing(sim.config(), g);
  recompute(sim);
}

void DynkinTracker::recompute(const Simulator& sim) {
  compensator_ = 0.0;
  quadratic_ = 0.0;
  for (std::size_t c = 0; c < delta_.size(); ++c) {
    weights_[c] = sim.channel_weight(c);
    compensator_ += n2_ * weights_[c] * delta_[c];
    quadratic_ += n2_ * weights_[c] * delta_[c] * delta_[c];
  }
  since_recompute_ = 0;
}

void DynkinTracker::on_advance(const Simulator&, double from, double to) {
  const double dt = to - from;
  compensator_integral_ += compensator_ * dt;
  qv_integral_ += quadratic_ * dt;
}

void DynkinTracker::on_event(const Simulator& sim, const EventRecord& rec) {
  pairing_ += delta_[rec.channel];
  if (++since_recompute_ >= (1u << 16)) {
    recompute(sim);
    return;
  }
  for (std::size_t c : sim.last_changed()) {
    const double w = sim.channel_weight(c);
    const double dw = w - weights_[c];
    compensator_ += n2_ * dw * delta_[c];
    quadratic_ += n2_ * dw * delta_[c] * delta_[c];
    weights_[c] = w;
  }
}

double dynkin_compensator(const ModelParams& p, const Configuration& c, const SpaceFunction& g) {
  const int n = p.n;
  const double nd = n;
  const auto& rate = *p.rate;
  const auto G = [&](int x) { return g(static_cast<double>(x) / nd); };
  double bulk = 0.0;
  for (int x = 2; x <= n - 2; ++x) {
    const double lap = nd * nd * (G(x + 1) + G(x - 1) - 2.0 * G(x));
    bulk += rate(c(x)) * lap;
  }
  bulk /= nd;
  const double grad_plus = nd * (G(2) - G(1));
  const double grad_minus = nd * (G(n - 1) - G(n - 2));
  const double g1 = rate(c(1));
  const double gn = rate(c(n - 1));
  const double boundary_scale = p.kappa / std::pow(nd, p.theta - 1.0);
  return bulk + g1 * grad_plus - gn * grad_minus + boundary_scale * (p.alpha - p.lambda * g1) * G(1) +
         boundary_scale * (p.beta - p.delta * gn) * G(n - 1);
}

double dynkin_quadratic_rate(const ModelParams& p, const Configuration& c, const SpaceFunction& g) {
  const int n = p.n;
  const double nd = n;
  const auto& rate = *p.rate;
  const auto G = [&](int x) { return g(static_cast<double>(x) / nd); };
  double acc = 0.0;
  for (int x = 1; x <= n - 1; ++x) {
    const double gx = rate(c(x));
    if (x + 1 <= n - 1) acc += gx * std::pow(G(x + 1) - G(x), 2);
    if (x - 1 >= 1) acc += gx * std::pow(G(x - 1) - G(x), 2);
  }
  const double nt = p.n_theta();
  acc += p.kappa * (p.alpha + p.lambda * rate(c(1))) / nt * G(1) * G(1);
  acc += p.kappa * (p.beta + p.delta * rate(c(n - 1))) / nt * G(n - 1) * G(n - 1);
  return acc;
}

DynkinResult dynkin_replay(const ModelParams& p, Configuration config, const std::vector<LoggedEvent>& events,
                           const SpaceFunction& g, double t_end) {
  const double start = empirical_pairing(config, g);
  double comp = 0.0;
  double qv = 0.0;
  double t = 0.0;
  for (const auto& ev : events) {
    if (ev.time > t_end) break;
    const double dt = ev.time - t;
    comp += dynkin_compensator(p, config, g) * dt;
    qv += dynkin_quadratic_rate(p, config, g) * dt;
    apply_event(config, ev);
    t = ev.time;
  }
  comp += dynkin_compensator(p, config, g) * (t_end - t);
  qv += dynkin_quadratic_rate(p, config, g) * (t_end - t);
  return {empirical_pairing(config, g) - start - comp, comp, qv};
}

OccupationIntegrator::OccupationIntegrator(const Simulator& sim) : t0_(sim.time()) {
  const auto occ = sim.config().occupations();
  occ_.assign(occ.begin(), occ.end());
  acc_.assign(occ_.size(), 0.0);
  since_.assign(occ_.size(), t0_);
}

void OccupationIntegrator::flush(int x, double t, std::uint32_t now) {
  const auto i = static_cast<std::size_t>(x - 1);
  acc_[i] += occ_[i] * (t - since_[i]);
  since_[i] = t;
  occ_[i] = now;
}

void OccupationIntegrator::on_event(const Simulator& sim, const EventRecord& rec) {
  const auto& c = sim.config();
  flush(rec.site, rec.time, c(rec.site));
  if (rec.cls == ChannelClass::bulk_right) flush(rec.site + 1, rec.time, c(rec.site + 1));
  if (rec.cls == ChannelClass::bulk_left) flush(rec.site - 1, rec.time, c(rec.site - 1));
}

std::vector<double> OccupationIntegrator::integrals(const Simulator& sim) const {
  std::vector<double> out(acc_.size());
  const double t = sim.time();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc_[i] + occ_[i] * (t - since_[i]);
  return out;
}

double apply_generator(const ModelParams& p, Configuration& scratch, const CylinderFunction& f) {
  const int n = p.n;
  const auto& rate = *p.rate;
  const double nt = p.n_theta();
  const double base = f.eval(scratch);

  // Channels touching the support, each listed once: (kind, site).
  // kind 0: move right from site, 1: move left from site, 2: inject, 3: remove.
  std::vector<std::pair<int, int>> channels;
  const auto push = [&](int kind, int site) {
    if (site < 1 || site > n - 1) return;
    if (kind == 0 && site > n - 2) return;
    if (kind == 1 && site < 2) return;
    const auto key = std::make_pair(kind, site);
    if (std::find(channels.begin(), channels.end(), key) == channels.end()) channels.push_back(key);
  };
  for (int s : f.support) {
    push(0, s);
    push(1, s);
    push(0, s - 1);
    push(1, s + 1);
    if (s == 1 || s == n - 1) {
      push(2, s);
      push(3, s);
    }
  }

  double acc = 0.0;
  for (const auto& [kind, site] : channels) {
    const bool left_end = site == 1;
    switch (kind) {
      case 0:
      case 1: {
        const double w = rate(scratch(site));
        if (w == 0.0) break;
        const int to = kind == 0 ? site + 1 : site - 1;
        scratch.move(site, to);
        acc += w * (f.eval(scratch) - base);
        scratch.move(to, site);
        break;
      }
      case 2: {
        const double w = p.kappa * (left_end ? p.alpha : p.beta) / nt;
        if (w == 0.0) break;
        scratch.add(site);
        acc += w * (f.eval(scratch) - base);
        scratch.remove(site);
        break;
      }
      case 3: {
        const double w = p.kappa * (left_end ? p.lambda : p.delta) * rate(scratch(site)) / nt;
        if (w == 0.0) break;
        scratch.remove(site);
        acc += w * (f.eval(scratch) - base);
        scratch.add(site);
        break;
      }
      default: break;
    }
  }
  return acc;
}

void write_checkpoint_rows(std::ostream& os, int replica, double t, const Configuration& c) {
  const std::string ts = format_number(t);
  for (int x = 1; x <= c.size() - 1; ++x) os << replica << ',' << ts << ',' << x << ',' << c(x) << '\n';
}

}  // namespace zrp
