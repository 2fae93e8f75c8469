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

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace zrp {

/// Shortest round-trip representation; identical bytes on every platform.
std::string format_number(double v);

/// Minimal CSV emitter: header on construction, one `row(...)` per line.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header);

  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    (emit(fields, first), ...);
    os_ << '\n';
  }

 private:
  void sep(bool& first) {
    if (!first) os_ << ',';
    first = false;
  }
  void emit(double v, bool& first) {
    sep(first);
    os_ << format_number(v);
  }
  template <std::integral T>
  void emit(T v, bool& first) {
    sep(first);
    os_ << v;
  }
  void emit(std::string_view v, bool& first) {
    sep(first);
    os_ << v;
  }
  void emit(const std::string& v, bool& first) { emit(std::string_view(v), first); }
  void emit(const char* v, bool& first) { emit(std::string_view(v), first); }

  std::ostream& os_;
};

}  // namespace zrp
