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

#include "zrp/configuration.hpp"

#include <numeric>
#include <string>

namespace zrp {

Configuration::Configuration(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("system size must be at least 2");
  occ_.assign(static_cast<std::size_t>(n - 1), 0);
}

Configuration::Configuration(int n, std::vector<std::uint32_t> occupations) : n_(n), occ_(std::move(occupations)) {
  if (n < 2) throw std::invalid_argument("system size must be at least 2");
  if (occ_.size() != static_cast<std::size_t>(n - 1))
    throw std::invalid_argument("expected " + std::to_string(n - 1) + " occupations, got " +
                                std::to_string(occ_.size()));
  total_ = std::accumulate(occ_.begin(), occ_.end(), std::uint64_t{0});
}

void Configuration::set(int x, std::uint32_t value) {
  auto& slot = occ_.at(static_cast<std::size_t>(x - 1));
  total_ = total_ - slot + value;
  slot = value;
}

bool Configuration::below(const Configuration& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t i = 0; i < occ_.size(); ++i)
    if (occ_[i] > other.occ_[i]) return false;
  return true;
}

}  // namespace zrp
