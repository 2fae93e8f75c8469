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

#include "zrp/rates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zrp {

std::string SgClass::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::power: os << "power(" << gamma << ")"; break;
    case Kind::indicator: os << "indicator"; break;
    case Kind::uniform_increase: os << "uniform-increase(" << m << "," << a << ")"; break;
    case Kind::other: os << "other"; break;
  }
  return os.str();
}

JumpRate::JumpRate(RateFamily family, std::string name, std::function<double(std::uint64_t)> rule)
    : family_(family), name_(std::move(name)), rule_(std::move(rule)) {}

void JumpRate::tabulate() {
  values_.resize(kCacheSize);
  log_factorials_.resize(kCacheSize);
  for (std::uint64_t k = 0; k < kCacheSize; ++k) values_[k] = rule_(k);
  log_factorials_[0] = 0.0;
  for (std::uint64_t k = 1; k < kCacheSize; ++k)
    log_factorials_[k] = log_factorials_[k - 1] + std::log(values_[k]);
  g_star_ = 0.0;
  monotone_ = true;
  for (std::uint64_t k = 0; k + 1 < kCacheSize; ++k) {
    const double inc = values_[k + 1] - values_[k];
    g_star_ = std::max(g_star_, std::abs(inc));
    if (inc < 0.0) monotone_ = false;
  }
}

double JumpRate::evaluate(std::uint64_t k) const { return rule_(k); }

double JumpRate::log_factorial(std::uint64_t k) const {
  if (k < log_factorials_.size()) return log_factorials_[k];
  double acc = log_factorials_.back();
  for (std::uint64_t j = log_factorials_.size(); j <= k; ++j) acc += std::log(evaluate(j));
  return acc;
}

JumpRate JumpRate::linear() {
  JumpRate g(RateFamily::linear, "linear", [](std::uint64_t k) { return static_cast<double>(k); });
  g.sg_class_ = {SgClass::Kind::uniform_increase, 0.0, 1, 1.0};
  g.tabulate();
  return g;
}

JumpRate JumpRate::indicator() {
  JumpRate g(RateFamily::indicator, "indicator", [](std::uint64_t k) { return k >= 1 ? 1.0 : 0.0; });
  g.sg_class_ = {SgClass::Kind::indicator, 0.0, 0, 0.0};
  g.tail_value_ = 1.0;
  g.tabulate();
  return g;
}

JumpRate JumpRate::power(double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw RateError("power rate requires 0 < gamma <= 1 (bounded increments), got " + std::to_string(gamma));
  std::ostringstream name;
  name << "power:gamma=" << gamma;
  JumpRate g(RateFamily::power, name.str(),
             [gamma](std::uint64_t k) { return k == 0 ? 0.0 : std::pow(static_cast<double>(k), gamma); });
  g.gamma_ = gamma;
  if (gamma < 1.0)
    g.sg_class_ = {SgClass::Kind::power, gamma, 0, 0.0};
  else
    g.sg_class_ = {SgClass::Kind::uniform_increase, 0.0, 1, 1.0};
  g.tabulate();
  return g;
}

JumpRate JumpRate::table(std::vector<double> values, std::string name) {
  if (values.size() < 2) throw RateError("rate table needs at least g(0) and g(1)");
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  JumpRate g(RateFamily::table, std::move(name), [shared](std::uint64_t k) {
    return k < shared->size() ? (*shared)[k] : shared->back();
  });
  g.tail_value_ = shared->back();
  g.tabulate();
  return g;
}

JumpRate JumpRate::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RateError("cannot open rate table " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      values.push_back(std::stod(line.substr(first)));
    } catch (const std::exception&) {
      throw RateError("malformed rate table line in " + path + ": " + line);
    }
  }
  return table(std::move(values), "table:" + path);
}

JumpRate JumpRate::custom(std::string name, std::function<double(std::uint64_t)> rule) {
  JumpRate g(RateFamily::custom, std::move(name), std::move(rule));
  g.tabulate();
  return g;
}

JumpRate JumpRate::parse(std::string_view spec) {
  if (spec == "linear") return linear();
  if (spec == "indicator") return indicator();
  if (spec.starts_with("power:")) {
    auto rest = spec.substr(6);
    if (!rest.starts_with("gamma=")) throw RateError("expected power:gamma=<float>, got " + std::string(spec));
    rest.remove_prefix(6);
    double gamma = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), gamma);
    if (ec != std::errc{} || ptr != rest.data() + rest.size())
      throw RateError("bad gamma in rate spec " + std::string(spec));
    return power(gamma);
  }
  if (spec.starts_with("table:")) return from_file(std::string(spec.substr(6)));
  throw RateError("unknown rate family: " + std::string(spec));
}

RateReport validate_rate(const JumpRate& g, std::uint64_t k_max) {
  if (k_max < 2) throw RateError("validate_rate requires k_max >= 2");
  RateReport report;
  double prev = g(0);
  if (!std::isfinite(prev)) throw RateError("rate is non-finite at k = 0");
  if (prev != 0.0) report.violations.push_back({0, "g(0) != 0"});
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    const double v = g(k);
    if (!std::isfinite(v)) throw RateError("rate is non-finite at k = " + std::to_string(k));
    if (v <= 0.0) report.violations.push_back({k, "g(k) <= 0"});
    const double inc = v - prev;
    report.g_star_empirical = std::max(report.g_star_empirical, std::abs(inc));
    if (inc < 0.0) report.monotone = false;
    prev = v;
  }
  return report;
}

void require_valid(const JumpRate& g, std::uint64_t k_max) {
  const auto report = validate_rate(g, k_max);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw RateError("invalid rate " + g.name() + ": " + v.reason + " at k = " + std::to_string(v.k));
  }
}

}  // namespace zrp
