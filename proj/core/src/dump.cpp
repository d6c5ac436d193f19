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

#include "ps3/dump.hpp"

#include <cstdio>
#include <sstream>

namespace ps3 {

std::string format_dump_header(const ConfigBlock& block) {
  std::ostringstream out;
  out << "# PowerSensor3 continuous dump\n";
  char buf[160];
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto& s = block[i];
    std::snprintf(buf, sizeof buf,
                  "# sensor %zu name=%s kind=%s vref=%.6g slope=%.6g offset=%.6g enabled=%d\n", i,
                  s.name.empty() ? "-" : s.name.c_str(),
                  s.kind == SensorKind::kCurrent ? "current" : "voltage",
                  static_cast<double>(s.vref), static_cast<double>(s.slope),
                  static_cast<double>(s.offset), s.enabled ? 1 : 0);
    out << buf;
  }
  out << "# columns: S time_s V0 I0 P0 V1 I1 P1 V2 I2 P2 V3 I3 P3 Ptotal [M<char>]\n";
  return out.str();
}

std::string format_dump_line(const DumpRecord& r) {
  char buf[384];
  int n = std::snprintf(buf, sizeof buf, "S %.6f",
                        static_cast<double>(r.device_time.count()) * 1e-6);
  for (std::size_t p = 0; p < kMaxPairs; ++p) {
    if (r.pair_enabled[p]) {
      n += std::snprintf(buf + n, sizeof buf - n, " %.4f %.4f %.4f", r.pairs[p].volts,
                         r.pairs[p].amps, r.pairs[p].watts);
    } else {
      n += std::snprintf(buf + n, sizeof buf - n, " - - -");
    }
  }
  n += std::snprintf(buf + n, sizeof buf - n, " %.4f", r.total_watts);
  if (r.marker) n += std::snprintf(buf + n, sizeof buf - n, " M%c", *r.marker);
  std::string line(buf, static_cast<std::size_t>(n));
  line += '\n';
  return line;
}

}  // namespace ps3
