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

#include <csignal>
#include <cstdio>
#include <memory>
#include <optional>

#include "common.hpp"
#include "ps3/runner.hpp"
#include "ps3/scenario.hpp"
#include "ps3/sim_config.hpp"

int main(int argc, char** argv) {
  using namespace ps3;
  CLI::App app{"Virtual PowerSensor3 on a pseudo-terminal or TCP port", "pssim"};
  bool pty = false;
  std::optional<std::uint16_t> tcp_port;
  std::string config_path, eeprom_path, load;
  bool realtime = false, accelerated = false;
  std::optional<std::uint64_t> seed;
  auto* pty_opt = app.add_flag("--pty", pty, "Serve on a new pseudo-terminal (default)");
  app.add_option("--tcp", tcp_port, "Serve on a TCP port (0 picks one)")->excludes(pty_opt);
  app.add_option("-c,--config", config_path, "Simulator configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--eeprom", eeprom_path, "Persist the configuration block in this file");
  app.add_option("--load", load, "Pair 0 load scenario, e.g. \"constant 1 12\"");
  app.add_option("--seed", seed, "Noise seed");
  auto* rt = app.add_flag("--realtime", realtime, "Pace ticks to the wall clock (default)");
  app.add_flag("--accelerated", accelerated, "Tick as fast as the host reads")->excludes(rt);

  // Block termination signals before any thread starts so sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::signal(SIGPIPE, SIG_IGN);

  return tools::run_tool(app, argc, argv, [&]() -> int {
    SimulatorSpec spec;
    spec.runner.mode = ClockMode::kRealtime;
    if (!config_path.empty()) spec = load_sim_config(config_path);
    if (realtime) spec.runner.mode = ClockMode::kRealtime;
    if (accelerated) spec.runner.mode = ClockMode::kAccelerated;
    spec.device.mode = spec.runner.mode;
    if (!eeprom_path.empty()) spec.device.eeprom_file = eeprom_path;
    if (!load.empty()) spec.device.loads[0] = parse_scenario(load);
    if (seed) spec.device.noise.seed = *seed;
    spec.runner.stop_on_close = false;

    VirtualDevice device(std::move(spec.device));
    TransportPtr link;
    if (tcp_port) {
      auto server = std::make_unique<TcpServer>(*tcp_port);
      std::printf("tcp:127.0.0.1:%u\n", static_cast<unsigned>(server->port()));
      link = std::move(server);
    } else {
      auto endpoint = open_pty();
      std::printf("%s\n", endpoint.slave_path.c_str());
      link = std::move(endpoint.master);
    }
    std::fflush(stdout);

    DeviceRunner runner(device, *link, spec.runner);
    runner.start();
    int sig = 0;
    sigwait(&signals, &sig);
    runner.stop();
    link->close();
    if (auto failure = runner.failure()) std::rethrow_exception(failure);
    return tools::kOk;
  });
}
