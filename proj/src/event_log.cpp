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

#include "zrp/event_log.hpp"

#include <array>
#include <bit>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace zrp {

namespace {

template <class T>
void put_le(std::array<unsigned char, kEventRecordBytes>& buf, std::size_t at, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[at + i] = static_cast<unsigned char>((value >> (8 * i)) & 0xffu);
}

template <class T>
T get_le(const std::array<unsigned char, kEventRecordBytes>& buf, std::size_t at) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[at + i]) << (8 * i);
  return value;
}

}  // namespace

void EventLogWriter::write(const EventRecord& rec) {
  write(LoggedEvent{rec.index, rec.time, rec.cls, static_cast<std::uint32_t>(rec.site)});
}

void EventLogWriter::write(const LoggedEvent& ev) {
  std::array<unsigned char, kEventRecordBytes> buf{};
  put_le<std::uint64_t>(buf, 0, ev.index);
  put_le<std::uint64_t>(buf, 8, std::bit_cast<std::uint64_t>(ev.time));
  buf[16] = static_cast<unsigned char>(ev.cls);
  put_le<std::uint32_t>(buf, 17, ev.site);
  os_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  ++records_;
}

std::vector<LoggedEvent> read_event_log(std::istream& is) {
  std::vector<LoggedEvent> out;
  std::array<unsigned char, kEventRecordBytes> buf{};
  for (;;) {
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = is.gcount();
    if (got == 0) break;
    if (got != static_cast<std::streamsize>(buf.size())) throw std::runtime_error("truncated event-log record");
    const auto cls = buf[16];
    if (cls > static_cast<unsigned char>(ChannelClass::remove_right))
      throw std::runtime_error("unknown channel class in event log");
    out.push_back({get_le<std::uint64_t>(buf, 0), std::bit_cast<double>(get_le<std::uint64_t>(buf, 8)),
                   static_cast<ChannelClass>(cls), get_le<std::uint32_t>(buf, 17)});
  }
  return out;
}

void apply_event(Configuration& config, const LoggedEvent& ev) {
  const int x = static_cast<int>(ev.site);
  switch (ev.cls) {
    case ChannelClass::bulk_right: config.move(x, x + 1); break;
    case ChannelClass::bulk_left: config.move(x, x - 1); break;
    case ChannelClass::inject_left:
    case ChannelClass::inject_right: config.add(x); break;
    case ChannelClass::remove_left:
    case ChannelClass::remove_right: config.remove(x); break;
  }
}

}  // namespace zrp
