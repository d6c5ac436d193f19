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

#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "ps3/device.hpp"
#include "ps3/transport.hpp"

namespace ps3 {

struct RunnerOptions {
  /// Accelerated runs ticks as fast as the link drains; realtime paces them
  /// to the wall clock.
  ClockMode mode = ClockMode::kAccelerated;
  /// Accelerated only: ticks run only as granted through grant().
  bool gated = false;
  std::size_t batch_ticks = 64;
  /// Exit on link loss (in-process links) instead of waiting for a new peer.
  bool stop_on_close = true;
};

/// Tick loop for a VirtualDevice: drains command bytes between ticks and
/// writes stream bytes to the link.
class DeviceRunner {
 public:
  DeviceRunner(VirtualDevice& device, Transport& link, RunnerOptions options);
  ~DeviceRunner();

  DeviceRunner(const DeviceRunner&) = delete;
  DeviceRunner& operator=(const DeviceRunner&) = delete;

  void start();
  void stop();

  /// Adds to the tick budget of a gated runner. Command bytes written to the
  /// link before this call are handled before any of the granted ticks.
  void grant(std::uint64_t ticks);

  bool running() const { return running_; }

  /// Non-link error that terminated the loop, if any.
  std::exception_ptr failure() const;

 private:
  void loop();

  VirtualDevice& device_;
  Transport& link_;
  RunnerOptions options_;
  std::atomic<std::uint64_t> budget_{0};
  std::atomic<bool> stop_{false};
  std::atomic<bool> running_{false};
  mutable std::mutex failure_mu_;
  std::exception_ptr failure_;
  std::thread thread_;
};

/// Device, runner and in-process channel bundled together. connect() hands
/// out the host end; the simulator lives as long as that end or any other
/// shared owner.
class EmbeddedSimulator : public std::enable_shared_from_this<EmbeddedSimulator> {
 public:
  static std::shared_ptr<EmbeddedSimulator> create(DeviceOptions device,
                                                   RunnerOptions runner = {});
  ~EmbeddedSimulator();

  /// Host end of the link. Only one may be taken.
  TransportPtr connect();

  VirtualDevice& device() { return *device_; }
  DeviceRunner& runner() { return *runner_; }
  void grant(std::uint64_t ticks) { runner_->grant(ticks); }

 private:
  EmbeddedSimulator(DeviceOptions device, RunnerOptions runner);

  std::unique_ptr<VirtualDevice> device_;
  TransportPtr device_end_;
  TransportPtr host_end_;
  std::unique_ptr<DeviceRunner> runner_;
};

}  // namespace ps3
