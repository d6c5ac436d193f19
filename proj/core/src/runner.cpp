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

#include "ps3/runner.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "ps3/error.hpp"

namespace ps3 {

using namespace std::chrono_literals;

DeviceRunner::DeviceRunner(VirtualDevice& device, Transport& link, RunnerOptions options)
    : device_(device), link_(link), options_(options) {}

DeviceRunner::~DeviceRunner() { stop(); }

void DeviceRunner::start() {
  if (thread_.joinable()) return;
  stop_ = false;
  running_ = true;
  thread_ = std::thread([this] { loop(); });
}

void DeviceRunner::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void DeviceRunner::grant(std::uint64_t ticks) { budget_ += ticks; }

std::exception_ptr DeviceRunner::failure() const {
  std::lock_guard lock(failure_mu_);
  return failure_;
}

void DeviceRunner::loop() {
  using Clock = std::chrono::steady_clock;
  std::vector<std::uint8_t> in(4096);
  std::vector<std::uint8_t> reply;
  std::vector<std::uint8_t> out;
  const bool realtime = options_.mode == ClockMode::kRealtime;
  Clock::time_point epoch{};
  std::uint64_t paced_ticks = 0;

  try {
    while (!stop_) {
      try {
        const std::uint64_t budget = budget_.load();
        const bool was_streaming = device_.streaming();
        const bool can_tick = was_streaming && (realtime || !options_.gated || budget > 0);

        auto timeout = can_tick ? 0ms : 1ms;
        for (;;) {
          const auto n = link_.read(in, timeout);
          if (n == 0) break;
          reply.clear();
          device_.handle_command(std::span(in.data(), n), reply);
          if (!reply.empty()) link_.write(reply);
          timeout = 0ms;
        }
        if (!device_.streaming()) continue;
        if (!was_streaming) {
          epoch = Clock::now();
          paced_ticks = 0;
        }

        std::uint64_t count = options_.batch_ticks;
        if (realtime) {
          const auto elapsed = Clock::now() - epoch;
          auto due = static_cast<std::uint64_t>(elapsed / std::chrono::microseconds(kTickMicros));
          if (due > paced_ticks + static_cast<std::uint64_t>(kSampleRateHz)) {
            // More than a second behind; restart pacing rather than burst.
            epoch = Clock::now();
            paced_ticks = 0;
            due = 0;
          }
          count = std::min<std::uint64_t>(due - paced_ticks, 400);
          if (count == 0) {
            std::this_thread::sleep_for(200us);
            continue;
          }
        } else if (options_.gated) {
          count = std::min<std::uint64_t>(count, budget);
          if (count == 0) continue;
        }

        out.clear();
        for (std::uint64_t i = 0; i < count; ++i) device_.tick(out);
        paced_ticks += count;
        if (options_.gated && !realtime) budget_ -= count;
        link_.write(out);
      } catch (const TransportClosed&) {
        if (options_.stop_on_close) break;
        device_.reset_link();
        std::this_thread::sleep_for(1ms);
      }
    }
  } catch (...) {
    std::lock_guard lock(failure_mu_);
    failure_ = std::current_exception();
  }
  running_ = false;
}

namespace {

// Host end that keeps the simulator alive for as long as it is in use.
class SimulatorLink : public Transport {
 public:
  SimulatorLink(std::shared_ptr<EmbeddedSimulator> sim, TransportPtr end)
      : sim_(std::move(sim)), end_(std::move(end)) {}
  ~SimulatorLink() override { end_->close(); }

  std::size_t read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) override {
    return end_->read(buf, timeout);
  }
  void write(std::span<const std::uint8_t> data) override { end_->write(data); }
  void close() override { end_->close(); }

 private:
  std::shared_ptr<EmbeddedSimulator> sim_;
  TransportPtr end_;
};

}  // namespace

EmbeddedSimulator::EmbeddedSimulator(DeviceOptions device, RunnerOptions runner) {
  device.mode = runner.mode;
  device_ = std::make_unique<VirtualDevice>(std::move(device));
  auto [a, b] = make_channel_pair();
  device_end_ = std::move(a);
  host_end_ = std::move(b);
  runner.stop_on_close = true;
  runner_ = std::make_unique<DeviceRunner>(*device_, *device_end_, runner);
  runner_->start();
}

std::shared_ptr<EmbeddedSimulator> EmbeddedSimulator::create(DeviceOptions device,
                                                             RunnerOptions runner) {
  return std::shared_ptr<EmbeddedSimulator>(new EmbeddedSimulator(std::move(device), runner));
}

EmbeddedSimulator::~EmbeddedSimulator() {
  device_end_->close();
  runner_->stop();
}

TransportPtr EmbeddedSimulator::connect() {
  if (!host_end_) throw TransportError("simulator link already taken");
  return std::make_unique<SimulatorLink>(shared_from_this(), std::move(host_end_));
}

}  // namespace ps3
