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

#include "zrp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "zrp/csv.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/random.hpp"

namespace zrp {

double CanonicalSpace::count(int sites, int particles) {
  if (sites == 0) return particles == 0 ? 1.0 : 0.0;
  // C(particles + sites - 1, sites - 1) in floating point.
  double c = 1.0;
  for (int i = 1; i <= sites - 1; ++i) c = c * (particles + i) / i;
  return std::round(c);
}

CanonicalSpace::CanonicalSpace(int sites, int particles) : sites_(sites), particles_(particles) {
  if (sites < 1) throw SpectralError("canonical space needs at least one site");
  if (particles < 0) throw SpectralError("particle number must be non-negative");
  if (particles > std::numeric_limits<std::uint16_t>::max()) throw SpectralError("too many particles");
  const double states = count(sites, particles);
  if (states > static_cast<double>(kMaxStates))
    throw SpectralError("canonical shell with " + std::to_string(sites) + " sites and " + std::to_string(particles) +
                        " particles has " + std::to_string(static_cast<long long>(states)) +
                        " states, above the cap of " + std::to_string(kMaxStates));
  size_ = static_cast<std::size_t>(states);

  const auto p1 = static_cast<std::size_t>(particles + 1);
  table_.assign(static_cast<std::size_t>(sites + 1) * p1, 0);
  table_[0] = 1;
  for (int s = 1; s <= sites; ++s) {
    // ways(s, r) = Σ_{v<=r} ways(s-1, r-v)
    std::size_t run = 0;
    for (int r = 0; r <= particles; ++r) {
      run += table_[static_cast<std::size_t>(s - 1) * p1 + r];
      table_[static_cast<std::size_t>(s) * p1 + r] = run;
    }
  }

  data_.resize(size_ * static_cast<std::size_t>(sites));
  std::vector<std::uint16_t> cur(static_cast<std::size_t>(sites), 0);
  std::size_t next = 0;
  // Odometer over descending lexicographic order.
  cur[0] = static_cast<std::uint16_t>(particles);
  for (;;) {
    std::copy(cur.begin(), cur.end(), data_.begin() + static_cast<std::ptrdiff_t>(next * sites));
    ++next;
    // Find the rightmost position (excluding the last) with a positive entry.
    int i = sites - 2;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == 0) --i;
    if (i < 0) break;
    --cur[static_cast<std::size_t>(i)];
    const int rest = std::accumulate(cur.begin() + i + 1, cur.end(), 0);
    std::fill(cur.begin() + i + 1, cur.end(), std::uint16_t{0});
    cur[static_cast<std::size_t>(i + 1)] = static_cast<std::uint16_t>(rest + 1);
  }
  if (next != size_) throw SpectralError("canonical enumeration produced an unexpected number of states");
}

std::size_t CanonicalSpace::index(std::span<const std::uint16_t> s) const {
  std::size_t rank = 0;
  int rem = particles_;
  for (int i = 0; i < sites_ - 1; ++i) {
    const int v = s[static_cast<std::size_t>(i)];
    // States with a larger value at position i come first.
    for (int w = v + 1; w <= rem; ++w) rank += ways(sites_ - i - 1, rem - w);
    rem -= v;
  }
  return rank;
}

CanonicalSpace enumerate_canonical(int sites, int particles) { return CanonicalSpace(sites, particles); }

GeneratorMatrix::GeneratorMatrix(CanonicalSpace space, std::vector<Entry> entries, std::vector<double> log_weights)
    : space_(std::move(space)), entries_(std::move(entries)), log_weights_(std::move(log_weights)) {
  const std::size_t n = space_.size();
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; });
  diag_.assign(n, 0.0);
  for (const auto& e : entries_) diag_[e.from] -= e.rate;

  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  double z = 0.0;
  for (double l : log_weights_) z += std::exp(l - top);
  const double log_z = top + std::log(z);
  weights_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    log_weights_[a] -= log_z;
    weights_[a] = std::exp(log_weights_[a]);
  }

  sym_.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{e.to, e.from, 0.0},
                                     [](const Entry& a, const Entry& b) {
                                       return a.from != b.from ? a.from < b.from : a.to < b.to;
                                     });
    const double back = (it != entries_.end() && it->from == e.to && it->to == e.from) ? it->rate : 0.0;
    sym_[i] = -std::sqrt(e.rate * back);
  }
}

double GeneratorMatrix::row_sum_defect() const {
  std::vector<double> sums(diag_);
  for (const auto& e : entries_) sums[e.from] += e.rate;
  double worst = 0.0;
  for (double s : sums) worst = std::max(worst, std::abs(s));
  return worst;
}

double GeneratorMatrix::detailed_balance_defect() const {
  const auto less = [](const Entry& a, const Entry& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; };
  double worst = 0.0;
  for (const auto& e : entries_) {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{e.to, e.from, 0.0}, less);
    if (it == entries_.end() || it->from != e.to || it->to != e.from) {
      if (e.rate > 0.0) worst = 1.0;
      continue;
    }
    // Compare in log space: log μ(a) + log r_ab vs log μ(b) + log r_ba.
    if (e.rate == 0.0 && it->rate == 0.0) continue;
    if (e.rate == 0.0 || it->rate == 0.0) {
      worst = 1.0;
      continue;
    }
    const double la = log_weights_[e.from] + std::log(e.rate);
    const double lb = log_weights_[e.to] + std::log(it->rate);
    worst = std::max(worst, -std::expm1(-std::abs(la - lb)));
  }
  return worst;
}

bool GeneratorMatrix::irreducible() const {
  const std::size_t n = dimension();
  if (n <= 1) return true;
  std::vector<std::size_t> start(n + 1, 0);
  for (const auto& e : entries_)
    if (e.rate > 0.0) ++start[e.from + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::uint32_t> fwd(start.back());
  std::vector<std::vector<std::uint32_t>> back(n);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto& e : entries_) {
      if (e.rate <= 0.0) continue;
      fwd[fill[e.from]++] = e.to;
      back[e.to].push_back(e.from);
    }
  }
  const auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      const auto visit = [&](std::uint32_t b) {
        if (!seen[b]) {
          seen[b] = 1;
          ++count;
          stack.push_back(b);
        }
      };
      if (forward) {
        for (std::size_t k = start[a]; k < start[a + 1]; ++k) visit(fwd[k]);
      } else {
        for (auto b : back[a]) visit(b);
      }
    }
    return count == n;
  };
  return reach(true) && reach(false);
}

Eigen::MatrixXd GeneratorMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) m(a, a) = diag_[static_cast<std::size_t>(a)];
  for (const auto& e : entries_) m(e.from, e.to) += e.rate;
  return m;
}

Eigen::MatrixXd GeneratorMatrix::symmetrized() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) s(a, a) = -diag_[static_cast<std::size_t>(a)];
  for (std::size_t i = 0; i < entries_.size(); ++i) s(entries_[i].from, entries_[i].to) += sym_[i];
  return s;
}

double GeneratorMatrix::symmetrization_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    const double direct = -e.rate * std::exp(0.5 * (log_weights_[e.from] - log_weights_[e.to]));
    worst = std::max(worst, std::abs(direct - sym_[i]));
  }
  return worst;
}

void GeneratorMatrix::apply_symmetrized(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const std::size_t n = dimension();
  y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) y[static_cast<Eigen::Index>(a)] = -diag_[a] * x[static_cast<Eigen::Index>(a)];
  for (std::size_t i = 0; i < entries_.size(); ++i) y[entries_[i].from] += sym_[i] * x[entries_[i].to];
}

namespace {

double log_weight(std::span<const std::uint16_t> s, const JumpRate& g) {
  double acc = 0.0;
  for (auto v : s) acc -= g.log_factorial(v);
  return acc;
}

// Nearest-neighbour moves between coordinates a and b in both directions.
void add_pair(std::vector<GeneratorMatrix::Entry>& out, const CanonicalSpace& space, std::size_t from,
              std::vector<std::uint16_t>& scratch, int a, int b, const JumpRate& g) {
  const auto st = space.state(from);
  for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
    const auto v = st[static_cast<std::size_t>(x)];
    if (v == 0) continue;
    const double rate = g(v);
    if (rate <= 0.0) continue;
    std::copy(st.begin(), st.end(), scratch.begin());
    --scratch[static_cast<std::size_t>(x)];
    ++scratch[static_cast<std::size_t>(y)];
    out.push_back({static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(space.index(scratch)), rate});
  }
}

GeneratorMatrix assemble(CanonicalSpace space, const JumpRate& g, const std::vector<std::pair<int, int>>& bonds) {
  std::vector<GeneratorMatrix::Entry> entries;
  std::vector<double> logw(space.size());
  std::vector<std::uint16_t> scratch(static_cast<std::size_t>(space.sites()));
  for (std::size_t a = 0; a < space.size(); ++a) {
    logw[a] = log_weight(space.state(a), g);
    for (const auto& [x, y] : bonds) add_pair(entries, space, a, scratch, x, y, g);
  }
  return GeneratorMatrix(std::move(space), std::move(entries), std::move(logw));
}

}  // namespace

GeneratorMatrix build_single_box(int ell, int particles, const JumpRate& g) {
  std::vector<std::pair<int, int>> bonds;
  for (int x = 0; x + 1 < ell; ++x) bonds.emplace_back(x, x + 1);
  return assemble(CanonicalSpace(ell, particles), g, bonds);
}

GeneratorMatrix build_coupled(int ell, int particles, const JumpRate& g) {
  if (ell < 1) throw SpectralError("box length must be positive");
  std::vector<std::pair<int, int>> bonds;
  for (int x = 0; x + 1 < ell; ++x) {
    bonds.emplace_back(x, x + 1);
    bonds.emplace_back(ell + x, ell + x + 1);
  }
  bonds.emplace_back(0, ell);
  return assemble(CanonicalSpace(2 * ell, particles), g, bonds);
}

namespace {

double lanczos_smallest(const GeneratorMatrix& g, int& iterations) {
  const auto n = static_cast<Eigen::Index>(g.dimension());
  const Eigen::Index max_steps = std::min<Eigen::Index>(n - 1, 1500);
  Eigen::VectorXd v0(n);
  for (Eigen::Index a = 0; a < n; ++a) v0[a] = std::sqrt(g.weights()[static_cast<std::size_t>(a)]);
  v0.normalize();

  double scale = 0.0;
  for (double d : g.diagonal()) scale = std::max(scale, -d);
  scale *= 2.0;

  Eigen::MatrixXd q(n, max_steps + 1);
  Rng rng(0x5eed);
  Eigen::VectorXd v(n);
  for (Eigen::Index a = 0; a < n; ++a) v[a] = rng.uniform() - 0.5;
  v -= v0.dot(v) * v0;
  v.normalize();
  q.col(0) = v;

  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(n);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    g.apply_symmetrized(q.col(k), w);
    const double a = q.col(k).dot(w);
    alpha.push_back(a);
    // Full reorthogonalization against the deflated direction and the basis.
    for (int pass = 0; pass < 2; ++pass) {
      w -= v0.dot(w) * v0;
      w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();
    const auto m = static_cast<Eigen::Index>(alpha.size());
    const bool breakdown = b <= 1e-12 * std::max(scale, 1.0);
    if (m % 10 == 0 || breakdown || k + 1 == max_steps) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      best = es.eigenvalues()[0];
      const double residual = std::abs(b * es.eigenvectors()(m - 1, 0));
      if (breakdown || residual <= 1e-11 * std::max(scale, 1.0)) {
        iterations = static_cast<int>(m);
        return best;
      }
    }
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  throw SpectralError("Lanczos did not converge within " + std::to_string(max_steps) + " steps");
}

}  // namespace

GapResult spectral_gap_detail(const GeneratorMatrix& g, std::size_t dense_limit) {
  const std::size_t n = g.dimension();
  if (n <= 1) return {std::numeric_limits<double>::infinity(), false, 0};
  if (!g.irreducible()) throw SpectralError("generator is reducible: zero eigenvalue is not simple");
  if (n <= dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.symmetrized(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev[ev.size() - 1]);
    if (ev[1] <= 1e-10 * scale) throw SpectralError("zero eigenvalue is not simple");
    return {ev[1], false, 0};
  }
  int iterations = 0;
  const double gap = lanczos_smallest(g, iterations);
  return {gap, true, iterations};
}

double spectral_gap(const GeneratorMatrix& g) { return spectral_gap_detail(g).gap; }

namespace {

std::vector<int> box_one_counts(const GeneratorMatrix& coupled, int ell) {
  const auto& space = coupled.space();
  std::vector<int> out(space.size());
  for (std::size_t a = 0; a < space.size(); ++a) {
    const auto st = space.state(a);
    out[a] = std::accumulate(st.begin(), st.begin() + ell, 0);
  }
  return out;
}

}  // namespace

double CoupledGapBound::bound() const {
  if (std::isinf(bridge)) return bridge;
  if (std::isinf(box_min)) return bridge / 3.0;
  return std::min(bridge / 3.0, bridge * box_min / (3.0 * exit_rate + bridge));
}

CoupledGapBound coupled_gap_bound(int ell, int particles, const JumpRate& g) {
  const GeneratorMatrix coupled = build_coupled(ell, particles, g);
  CoupledGapBound out{};
  out.coupled_gap = spectral_gap(coupled);

  out.box_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= particles; ++k) {
    const GeneratorMatrix box = build_single_box(ell, k, g);
    if (box.dimension() > 1) out.box_min = std::min(out.box_min, spectral_gap(box));
  }

  const int j = particles;
  const auto n1 = box_one_counts(coupled, ell);
  std::vector<double> pi(static_cast<std::size_t>(j + 1), 0.0);
  std::vector<double> flux(static_cast<std::size_t>(std::max(j, 0)), 0.0);
  const auto& space = coupled.space();
  for (std::size_t a = 0; a < space.size(); ++a) {
    const auto k = static_cast<std::size_t>(n1[a]);
    pi[k] += coupled.weights()[a];
    // Flux k -> k-1 across the bridge, leaving box one's first site.
    const auto first = space.state(a)[0];
    const auto other = space.state(a)[static_cast<std::size_t>(ell)];
    if (k >= 1 && first > 0) flux[k - 1] += coupled.weights()[a] * g(first);
    out.exit_rate = std::max(out.exit_rate, g(first) + g(other));
  }
  if (j == 0) {
    out.bridge = std::numeric_limits<double>::infinity();
    out.heuristic = std::numeric_limits<double>::infinity();
    return out;
  }
  // Symmetrized birth-death chain on {0..j} with conductances flux[k].
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(j + 1, j + 1);
  for (int k = 0; k < j; ++k) {
    const double c = flux[static_cast<std::size_t>(k)];
    const double pk = pi[static_cast<std::size_t>(k)];
    const double pk1 = pi[static_cast<std::size_t>(k + 1)];
    s(k, k) += c / pk;
    s(k + 1, k + 1) += c / pk1;
    s(k, k + 1) -= c / std::sqrt(pk * pk1);
    s(k + 1, k) -= c / std::sqrt(pk * pk1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  out.bridge = es.eigenvalues()[1];
  double min_pi = std::numeric_limits<double>::infinity();
  for (int l = 1; l <= j; ++l) min_pi = std::min(min_pi, pi[static_cast<std::size_t>(l)]);
  out.heuristic = g(1) * min_pi / j;
  return out;
}

VarianceSplit variance_split(const GeneratorMatrix& coupled, int ell, std::span<const double> f) {
  const auto& w = coupled.weights();
  const auto n1 = box_one_counts(coupled, ell);
  const int j = coupled.space().particles();
  std::vector<double> mass(static_cast<std::size_t>(j + 1), 0.0);
  std::vector<double> sum(mass.size(), 0.0);
  double mean = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    mean += w[a] * f[a];
    mass[static_cast<std::size_t>(n1[a])] += w[a];
    sum[static_cast<std::size_t>(n1[a])] += w[a] * f[a];
  }
  std::vector<double> cond(mass.size(), 0.0);
  for (std::size_t k = 0; k < mass.size(); ++k)
    if (mass[k] > 0.0) cond[k] = sum[k] / mass[k];
  VarianceSplit out{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < w.size(); ++a) {
    out.total += w[a] * (f[a] - mean) * (f[a] - mean);
    const double d = f[a] - cond[static_cast<std::size_t>(n1[a])];
    out.within += w[a] * d * d;
  }
  for (std::size_t k = 0; k < mass.size(); ++k) out.between += mass[k] * (cond[k] - mean) * (cond[k] - mean);
  return out;
}

double total_variance_decomposition_check(int ell, int particles, const JumpRate& g, int trials,
                                          std::uint64_t seed) {
  const GeneratorMatrix coupled = build_coupled(ell, particles, g);
  Rng rng(seed);
  std::vector<double> f(coupled.dimension());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (double& v : f) v = rng.normal();
    worst = std::max(worst, std::abs(variance_split(coupled, ell, f).defect()));
  }
  return worst;
}

std::vector<GapScanRow> gap_scan(std::span<const RatePtr> rates, std::span<const int> ells,
                                 std::span<const int> particles, int workers) {
  struct Job {
    const RatePtr* rate;
    int ell;
    int j;
  };
  std::vector<Job> jobs;
  for (const auto& r : rates)
    for (int ell : ells)
      for (int j : particles) jobs.push_back({&r, ell, j});
  return run_replicas<GapScanRow>(
      jobs.size(),
      [&](std::size_t i) {
        const Job& job = jobs[i];
        const GeneratorMatrix m = build_single_box(job.ell, job.j, **job.rate);
        return GapScanRow{(*job.rate)->name(), job.ell, job.j, m.dimension(), spectral_gap(m)};
      },
      workers);
}

void write_gap_csv(std::ostream& os, std::span<const GapScanRow> rows) {
  CsvWriter csv(os, {"rate", "ell", "j", "dimension", "gap", "gap_ell2"});
  for (const auto& r : rows) csv.row(r.rate, r.ell, r.particles, r.dimension, r.gap, r.scaled());
}

}  // namespace zrp
