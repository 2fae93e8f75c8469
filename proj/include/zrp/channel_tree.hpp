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

#include <bit>
#include <cstddef>
#include <vector>

namespace zrp {

/// Complete binary tree of channel weights: leaf update and weighted draw
/// in O(log n). Internal nodes are recomputed from their children on every
/// update, so sums never accumulate drift.
class ChannelTree {
 public:
  explicit ChannelTree(std::size_t channels)
      : channels_(channels), leaves_(std::bit_ceil(channels < 1 ? std::size_t{1} : channels)),
        nodes_(2 * leaves_, 0.0) {}

  std::size_t size() const { return channels_; }
  double weight(std::size_t c) const { return nodes_[leaves_ + c]; }
  double total() const { return nodes_[1]; }

  void set(std::size_t c, double w) {
    std::size_t i = leaves_ + c;
    nodes_[i] = w;
    for (i >>= 1; i != 0; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
  }

  /// Leaf whose cumulative weight interval contains `target` in [0, total()).
  /// Never returns a zero-weight leaf while total() > 0.
  std::size_t find(double target) const {
    std::size_t i = 1;
    while (i < leaves_) {
      const double left = nodes_[2 * i];
      if (target < left || nodes_[2 * i + 1] <= 0.0) {
        i = 2 * i;
      } else {
        target -= left;
        i = 2 * i + 1;
      }
    }
    return i - leaves_;
  }

  /// Recomputes every internal node from the leaves.
  void rebuild() {
    for (std::size_t i = leaves_ - 1; i >= 1; --i) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
  }

  /// Largest |stored - recomputed| over internal nodes.
  double internal_defect() const {
    double worst = 0.0;
    for (std::size_t i = 1; i < leaves_; ++i) {
      const double d = nodes_[i] - (nodes_[2 * i] + nodes_[2 * i + 1]);
      worst = d < 0 ? (-d > worst ? -d : worst) : (d > worst ? d : worst);
    }
    return worst;
  }

 private:
  std::size_t channels_;
  std::size_t leaves_;
  std::vector<double> nodes_;
};

}  // namespace zrp
