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
#include <span>
#include <vector>

namespace zrp {

/// Streaming mean and variance (Welford).
class RunningStats {
 public:
  void add(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const;
  void merge(const RunningStats& other);

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
double std_error(std::span<const double> xs);

/// Standard error of the sample variance, sqrt((m4 - s⁴ (n-3)/(n-1)) / n).
double variance_std_error(std::span<const double> xs);

/// Bootstrap standard error of `statistic` over `resamples` resamples of
/// the index set {0..n-1}, drawn from a stream seeded with `seed`.
double bootstrap_std_error(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                           int resamples, std::uint64_t seed);

/// p-value of the chi-square two-sample homogeneity test on integer
/// samples; bins with expected count below 5 are pooled into their
/// neighbours.
double chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace zrp
