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
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zrp {

class RateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RateFamily { linear, indicator, power, table, custom };

/// Spectral-gap class tag: which known sufficient condition the rate meets.
struct SgClass {
  enum class Kind { power, indicator, uniform_increase, other };
  Kind kind = Kind::other;
  double gamma = 0.0;  // power(γ)
  int m = 0;           // uniform-increase(M, a): g(k) - g(j) >= a whenever k >= j + M
  double a = 0.0;

  std::string describe() const;
};

/// Jump rate g: N -> [0, inf) with g(0) = 0.
///
/// Values below `kCacheSize` are tabulated at construction together with
/// log g(k)!; larger occupations are evaluated on demand from the rule.
/// Instances are immutable and may be shared across threads.
class JumpRate {
 public:
  static constexpr std::uint64_t kCacheSize = 4096;

  static JumpRate linear();
  static JumpRate indicator();
  /// g(k) = k^gamma, 0 < gamma <= 1.
  static JumpRate power(double gamma);
  /// values[k] = g(k); the last value is continued for larger k.
  static JumpRate table(std::vector<double> values, std::string name = "table");
  static JumpRate from_file(const std::string& path);
  static JumpRate custom(std::string name, std::function<double(std::uint64_t)> rule);

  /// Parses `power:gamma=<float>`, `indicator`, `linear` or `table:<path>`.
  static JumpRate parse(std::string_view spec);

  double operator()(std::uint64_t k) const {
    return k < values_.size() ? values_[k] : evaluate(k);
  }

  /// log of g(k)! = log prod_{1<=j<=k} g(j).
  double log_factorial(std::uint64_t k) const;

  RateFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  /// sup_{k>=0} |g(k+1) - g(k)| over the tabulated range.
  double g_star() const { return g_star_; }
  bool monotone() const { return monotone_; }
  const SgClass& sg_class() const { return sg_class_; }
  double gamma() const { return gamma_; }
  /// Continuation value for tables (the last listed rate).
  double tail_value() const { return tail_value_; }

 private:
  JumpRate(RateFamily family, std::string name, std::function<double(std::uint64_t)> rule);
  double evaluate(std::uint64_t k) const;
  void tabulate();

  RateFamily family_;
  std::string name_;
  std::function<double(std::uint64_t)> rule_;
  std::vector<double> values_;
  std::vector<double> log_factorials_;
  double g_star_ = 0.0;
  bool monotone_ = true;
  SgClass sg_class_;
  double gamma_ = 1.0;
  double tail_value_ = 0.0;
};

using RatePtr = std::shared_ptr<const JumpRate>;

inline RatePtr share(JumpRate rate) { return std::make_shared<const JumpRate>(std::move(rate)); }

struct RateViolation {
  std::uint64_t k;
  std::string reason;
};

struct RateReport {
  double g_star_empirical = 0.0;
  bool monotone = true;
  std::vector<RateViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks g(0) = 0, g(k) > 0 for 1 <= k <= k_max, and measures the
/// increment bound and monotonicity over 0 <= k <= k_max.
/// Throws RateError if k_max < 2 or g is non-finite at a checked k.
RateReport validate_rate(const JumpRate& g, std::uint64_t k_max);

/// Throws RateError listing the first violation if the report is not clean.
void require_valid(const JumpRate& g, std::uint64_t k_max = JumpRate::kCacheSize - 1);

}  // namespace zrp
