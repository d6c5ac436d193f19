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

#include <cstdio>

#include "common.hpp"
#include "ps3/host.hpp"

int main(int argc, char** argv) {
  using namespace ps3;
  CLI::App app{"Show sensor configuration, latest readings and total power", "psinfo"};
  std::string address = tools::kDefaultAddress;
  tools::add_address_option(app, address);

  return tools::run_tool(app, argc, argv, [&] {
    auto session = Session::connect(address);
    const auto state = session.wait_for_ticks(session.read_state().ticks + 1, std::chrono::seconds(2));
    const auto cfg = session.get_config();
    for (std::size_t i = 0; i < kMaxSensors; ++i) {
      const auto& s = cfg[i];
      if (!s.enabled) continue;
      const std::size_t p = i / 2;
      const bool current = s.kind == SensorKind::kCurrent;
      std::printf("%zu %-11s vref %.4f V  slope %.6f  offset %+.6f V  ", i, s.name.c_str(),
                  static_cast<double>(s.vref), static_cast<double>(s.slope),
                  static_cast<double>(s.offset));
      if (state.pair_enabled[p])
        std::printf("%9.4f %s\n", current ? state.pairs[p].amps : state.pairs[p].volts,
                    current ? "A" : "V");
      else
        std::printf("%9s\n", "-");
    }
    std::printf("total: %.1f W\n", state.total_watts());
    return tools::kOk;
  });
}
