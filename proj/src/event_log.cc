// Copyright 2026 The dyndense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>

#include "dyndense/error.hpp"
#include "dyndense/sim.hpp"

namespace dyndense {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void EventLog::open(const std::string& path) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::kIo, "cannot write event log " + path);
}

void EventLog::write_header(const std::string& json_object) {
  emit("{\"header\":" + json_object + "}");
}

void EventLog::record(std::uint64_t round, std::int64_t node, std::string_view event,
                      std::uint64_t payload_hash, std::uint64_t bits) {
  char buf[192];
  const int len = std::snprintf(
      buf, sizeof buf, "{\"round\":%llu,\"node\":%lld,\"event\":\"%.*s\",\"payload_hash\":\"%016llx\",\"bits\":%llu}",
      static_cast<unsigned long long>(round), static_cast<long long>(node),
      static_cast<int>(event.size()), event.data(), static_cast<unsigned long long>(payload_hash),
      static_cast<unsigned long long>(bits));
  emit(std::string(buf, static_cast<std::size_t>(len)));
}

void EventLog::emit(const std::string& line) {
  for (const char c : line) {
    digest_ ^= static_cast<std::uint8_t>(c);
    digest_ *= 0x00000100000001b3ull;
  }
  digest_ ^= '\n';
  digest_ *= 0x00000100000001b3ull;
  ++lines_;
  if (out_.is_open()) out_ << line << '\n';
}

void EventLog::flush() {
  if (out_.is_open()) out_.flush();
}

}  // namespace dyndense
