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

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "ps3/error.hpp"

namespace ps3::tools {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDevice = 2,
  kAnalysis = 3,
  kSpawnFailed = 127,
};

inline constexpr const char* kDefaultAddress = "/dev/ttyACM0";

inline void add_address_option(CLI::App& app, std::string& address) {
  app.add_option("-d,--device", address,
                 "Device address: serial/pty path, tcp:<host>:<port>, sim: or sim:<config>")
      ->capture_default_str();
}

/// Parses arguments and runs `body`, mapping errors onto exit codes.
inline int run_tool(CLI::App& app, int argc, char** argv, const std::function<int()>& body) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  const auto name = app.get_name();
  try {
    return body();
  } catch (const AnalysisError& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kAnalysis;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return kDevice;
  }
}

}  // namespace ps3::tools
