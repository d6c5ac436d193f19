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

#include <spawn.h>
#include <sys/wait.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <optional>
#include <vector>

#include "common.hpp"
#include "ps3/host.hpp"

extern char** environ;

namespace {

// Exit status of the child in shell convention.
int wait_child(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return ps3::tools::kDevice;
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return ps3::tools::kDevice;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ps3;
  using namespace std::chrono_literals;
  CLI::App app{"Run a command and report the energy it consumed", "psrun"};
  app.prefix_command();
  app.usage("psrun [-d device] [-f dumpfile] [--] command [args...]");
  std::string address = tools::kDefaultAddress;
  std::string dump_path;
  tools::add_address_option(app, address);
  app.add_option("-f,--dump", dump_path, "Write a continuous dump covering the command");

  return tools::run_tool(app, argc, argv, [&]() -> int {
    auto command = app.remaining();
    if (!command.empty() && command.front() == "--") command.erase(command.begin());
    if (command.empty()) {
      std::fprintf(stderr, "psrun: no command given\n%s", app.help().c_str());
      return tools::kUsage;
    }

    auto session = Session::connect(address);
    if (!dump_path.empty()) session.start_dump(dump_path);
    // Anchor on a tick received after the dump started so the dump covers it.
    const auto before = session.wait_for_ticks(session.read_state().ticks + 1, 2s);

    std::vector<char*> args;
    for (auto& a : command) args.push_back(a.data());
    args.push_back(nullptr);
    pid_t pid = 0;
    const int err = ::posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ);
    if (err != 0) {
      std::fprintf(stderr, "psrun: cannot run %s: %s\n", args[0], std::strerror(err));
      if (!dump_path.empty()) session.stop_dump();
      return tools::kSpawnFailed;
    }
    const int child = wait_child(pid);

    try {
      const auto after = session.wait_for_ticks(session.read_state().ticks + 1, 2s);
      if (!dump_path.empty()) session.stop_dump();
      std::fprintf(stderr, "%.3f J  %.3f s  %.3f W\n", joules(before, after),
                   seconds(before, after), watts(before, after));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "psrun: device error during run: %s\n", e.what());
      return child != 0 ? child : tools::kDevice;
    }
    return child;
  });
}
