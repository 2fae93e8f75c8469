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
#include <span>
#include <stdexcept>
#include <vector>

namespace zrp {

/// Occupation numbers η(1..N-1) on the bulk of a system of size N.
/// Sites are 1-based, matching the lattice labels.
class Configuration {
 public:
  Configuration() = default;
  /// Empty configuration.
  explicit Configuration(int n);
  Configuration(int n, std::vector<std::uint32_t> occupations);

  int size() const { return n_; }
  int sites() const { return n_ - 1; }
  std::uint32_t operator()(int x) const { return occ_[static_cast<std::size_t>(x - 1)]; }
  std::uint64_t total() const { return total_; }
  std::span<const std::uint32_t> occupations() const { return occ_; }

  /// η -> η^{x,y}: one particle from x to y.
  void move(int x, int y) {
    --occ_[static_cast<std::size_t>(x - 1)];
    ++occ_[static_cast<std::size_t>(y - 1)];
  }
  /// η -> η^{x+}.
  void add(int x) {
    ++occ_[static_cast<std::size_t>(x - 1)];
    ++total_;
  }
  /// η -> η^{x-}.
  void remove(int x) {
    --occ_[static_cast<std::size_t>(x - 1)];
    --total_;
  }
  void set(int x, std::uint32_t value);

  /// Componentwise η <= ξ.
  bool below(const Configuration& other) const;

  bool operator==(const Configuration&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint32_t> occ_;
  std::uint64_t total_ = 0;
};

}  // namespace zrp
