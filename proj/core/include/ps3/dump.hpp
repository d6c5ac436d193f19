/*
 * Copyright 2026 The PowerSensor3 Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>

#include "ps3/host.hpp"

namespace ps3 {

/// One continuous-mode line: everything the host knew after one tick.
struct DumpRecord {
  std::chrono::microseconds device_time{0};
  std::array<PairReading, kMaxPairs> pairs{};
  std::array<bool, kMaxPairs> pair_enabled{};
  double total_watts = 0.0;
  std::optional<char> marker;
};

/// '#'-prefixed header lines (config summary and column legend), each LF
/// terminated.
std::string format_dump_header(const ConfigBlock& block);

/// `S <t> <V0> <I0> <P0> ... <V3> <I3> <P3> <Ptotal>[ M<c>]` plus LF. Time
/// has 6 decimals, physical values 4; disabled pairs print `- - -`.
std::string format_dump_line(const DumpRecord& record);

}  // namespace ps3
