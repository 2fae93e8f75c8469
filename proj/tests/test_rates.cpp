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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "zrp/rates.hpp"

using zrp::JumpRate;

TEST_CASE("validate_rate on the shipped families") {
  for (const auto& g : {JumpRate::linear(), JumpRate::indicator(), JumpRate::power(0.5)}) {
    const auto report = zrp::validate_rate(g, 100);
    CHECK(report.ok());
    CHECK(report.monotone);
    CHECK(report.g_star_empirical == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.g_star() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("sqrt increments shrink") {
  const auto g = JumpRate::power(0.5);
  for (std::uint64_t k = 1; k < 200; ++k) {
    CHECK(g(k + 1) - g(k) < g(k) - g(k - 1));
    CHECK(g(k) == doctest::Approx(std::sqrt(static_cast<double>(k))));
  }
}

TEST_CASE("log factorial matches direct sum") {
  const auto g = JumpRate::power(0.7);
  double acc = 0.0;
  CHECK(g.log_factorial(0) == 0.0);
  for (std::uint64_t k = 1; k <= 5000; ++k) {
    acc += 0.7 * std::log(static_cast<double>(k));
    CHECK(g.log_factorial(k) == doctest::Approx(acc).epsilon(1e-12));
  }
  const auto lin = JumpRate::linear();
  CHECK(lin.log_factorial(10) == doctest::Approx(std::lgamma(11.0)).epsilon(1e-13));
}

TEST_CASE("parse round trips") {
  CHECK(JumpRate::parse("linear").family() == zrp::RateFamily::linear);
  CHECK(JumpRate::parse("indicator").family() == zrp::RateFamily::indicator);
  const auto p = JumpRate::parse("power:gamma=0.25");
  CHECK(p.family() == zrp::RateFamily::power);
  CHECK(p.gamma() == 0.25);
  CHECK(p(16) == doctest::Approx(2.0));
  CHECK_THROWS_AS(JumpRate::parse("power:gamma=1.5"), zrp::RateError);
  CHECK_THROWS_AS(JumpRate::parse("power:gamma=0"), zrp::RateError);
  CHECK_THROWS_AS(JumpRate::parse("quadratic"), zrp::RateError);
  CHECK_THROWS_AS(JumpRate::parse("power:gamma=abc"), zrp::RateError);
}

TEST_CASE("table rates continue the last value") {
  const auto g = JumpRate::table({0.0, 1.0, 3.0, 4.0});
  CHECK(g(2) == 3.0);
  CHECK(g(50) == 4.0);
  CHECK(g(100000) == 4.0);
  CHECK(g.tail_value() == 4.0);
  CHECK(g.g_star() == doctest::Approx(2.0));
  CHECK(g.monotone());
}

TEST_CASE("table from file") {
  const auto path = std::filesystem::temp_directory_path() / "zrp_rate_table.txt";
  {
    std::ofstream os(path);
    os << "# k g(k)\n0\n1\n1.5\n1.75\n";
  }
  const auto g = JumpRate::parse("table:" + path.string());
  CHECK(g.family() == zrp::RateFamily::table);
  CHECK(g(3) == 1.75);
  CHECK(g(9) == 1.75);
  std::filesystem::remove(path);
}

TEST_CASE("invalid rates are rejected") {
  // g(0) must vanish and g(k) > 0 for k >= 1
  CHECK_THROWS_AS(zrp::require_valid(JumpRate::table({1.0, 1.0})), zrp::RateError);
  CHECK_THROWS_AS(zrp::require_valid(JumpRate::table({0.0, 0.0, 1.0})), zrp::RateError);
  const auto wiggle = JumpRate::table({0.0, 2.0, 1.0, 2.0});
  const auto report = zrp::validate_rate(wiggle, 10);
  CHECK_FALSE(report.monotone);
  CHECK(report.g_star_empirical == doctest::Approx(2.0));
}

TEST_CASE("spectral-gap classes") {
  CHECK(JumpRate::power(0.5).sg_class().kind == zrp::SgClass::Kind::power);
  CHECK(JumpRate::indicator().sg_class().kind == zrp::SgClass::Kind::indicator);
  CHECK(JumpRate::linear().sg_class().kind == zrp::SgClass::Kind::uniform_increase);
}
