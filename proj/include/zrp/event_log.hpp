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
#include <iosfwd>
#include <vector>

#include "zrp/simulator.hpp"

namespace zrp {

/// One record of the binary event log. On disk each record is 21 bytes,
/// little-endian and unpadded: u64 index, f64 time, u8 channel class, u32 site.
struct LoggedEvent {
  std::uint64_t index;
  double time;
  ChannelClass cls;
  std::uint32_t site;

  bool operator==(const LoggedEvent&) const = default;
};

inline constexpr std::size_t kEventRecordBytes = 21;

class EventLogWriter {
 public:
  explicit EventLogWriter(std::ostream& os) : os_(os) {}
  void write(const EventRecord& rec);
  void write(const LoggedEvent& ev);
  std::uint64_t records() const { return records_; }

 private:
  std::ostream& os_;
  std::uint64_t records_ = 0;
};

/// Reads records until end of stream. Throws std::runtime_error on a
/// truncated record or an unknown channel class.
std::vector<LoggedEvent> read_event_log(std::istream& is);

/// Collects events in memory (for replay diagnostics).
class EventCollector : public Observer {
 public:
  void on_event(const Simulator&, const EventRecord& rec) override {
    events_.push_back({rec.index, rec.time, rec.cls, static_cast<std::uint32_t>(rec.site)});
  }
  const std::vector<LoggedEvent>& events() const { return events_; }

 private:
  std::vector<LoggedEvent> events_;
};

/// Applies a logged event to a configuration.
void apply_event(Configuration& config, const LoggedEvent& ev);

}  // namespace zrp
