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
  using namespace std::chrono_literals;
  CLI::App app{"Measure power and energy over doubling intervals", "pstest"};
  std::string address = tools::kDefaultAddress;
  tools::add_address_option(app, address);

  return tools::run_tool(app, argc, argv, [&] {
    auto session = Session::connect(address);
    std::printf("%12s %14s %12s\n", "interval s", "energy J", "power W");
    for (int k = 0; k <= 10; ++k) {
      const std::chrono::microseconds span = 1ms * (1 << k);
      const auto [a, b] = session.measure_interval(
          span, 10s + std::chrono::duration_cast<std::chrono::milliseconds>(span * 4));
      std::printf("%12.6f %14.6f %12.4f\n", seconds(a, b), joules(a, b), watts(a, b));
      std::fflush(stdout);
    }
    return tools::kOk;
  });
}
