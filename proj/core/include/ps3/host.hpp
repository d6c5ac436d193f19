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
#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ps3/protocol.hpp"
#include "ps3/sensor_config.hpp"
#include "ps3/transport.hpp"

namespace ps3 {

/// Inverse of the sensor transfer: amps for current sensors, bus volts for
/// voltage sensors.
double raw_to_physical(std::uint16_t level, const SensorConfig& cfg);

/// Volts at the ADC input for a raw level.
inline double level_to_adc_volts(double level, double vref) { return level / kMaxLevel * vref; }

/// Energy kept as integer nanojoules so sums and differences are exact.
class Energy {
 public:
  constexpr Energy() = default;
  static constexpr Energy from_nanojoules(std::int64_t nj) { return Energy(nj); }

  constexpr std::int64_t nanojoules() const { return nj_; }
  constexpr double joules() const { return static_cast<double>(nj_) * 1e-9; }

  constexpr Energy& operator+=(Energy o) {
    nj_ += o.nj_;
    return *this;
  }
  friend constexpr Energy operator+(Energy a, Energy b) { return Energy(a.nj_ + b.nj_); }
  friend constexpr Energy operator-(Energy a, Energy b) { return Energy(a.nj_ - b.nj_); }
  friend constexpr auto operator<=>(Energy, Energy) = default;

 private:
  constexpr explicit Energy(std::int64_t nj) : nj_(nj) {}
  std::int64_t nj_ = 0;
};

struct PairReading {
  double volts = 0.0;
  double amps = 0.0;
  double watts = 0.0;
  std::chrono::microseconds device_time{0};
};

/// Host-side snapshot. All readings come from the same device tick.
struct MeasurementState {
  std::array<PairReading, kMaxPairs> pairs{};
  std::array<bool, kMaxPairs> pair_enabled{};
  std::array<Energy, kMaxPairs> pair_energy{};
  Energy total_energy;
  std::chrono::microseconds device_time{0};
  std::chrono::steady_clock::time_point host_time{};
  std::uint64_t ticks = 0;
  std::uint64_t samples = 0;
  std::uint64_t timestamps = 0;
  std::uint64_t dropped_bytes = 0;

  double total_watts() const;
};

/// Energy between two snapshots; throws OrderingError when b precedes a.
Energy energy(const MeasurementState& a, const MeasurementState& b);
double joules(const MeasurementState& a, const MeasurementState& b);
double seconds(const MeasurementState& a, const MeasurementState& b);
/// Average power; throws ZeroIntervalError when no device time elapsed.
double watts(const MeasurementState& a, const MeasurementState& b);

/// Per-pair variants (pair index 0..3).
double joules(const MeasurementState& a, const MeasurementState& b, std::size_t pair);
double watts(const MeasurementState& a, const MeasurementState& b, std::size_t pair);

struct MarkerEvent {
  char character = '?';
  std::chrono::microseconds device_time{0};
  std::uint64_t tick = 0;
};

/// Per-sensor raw statistics gathered over a number of ticks.
struct RawCapture {
  std::array<std::uint64_t, kMaxSensors> count{};
  std::array<double, kMaxSensors> mean_level{};
  std::array<double, kMaxSensors> std_level{};
};

struct ConnectOptions {
  /// Deadline for the config reply and for the first streamed tick.
  std::chrono::milliseconds deadline{1000};
  /// Quiet period that marks the end of a stream after StopStream.
  std::chrono::milliseconds idle_window{20};
};

/// Opens "sim:" (embedded accelerated simulator), "sim:<config file>",
/// "tcp:<host>:<port>" or a serial/pty device path.
TransportPtr open_address(const std::string& address);

/// Client for one device. Owns a receiver thread that decodes the stream,
/// converts readings and integrates energy, and an optional dump writer.
/// Public methods may be called from any thread.
class Session {
 public:
  /// Reads the config block, starts streaming and waits for the first tick.
  /// Throws TransportError, ProtocolError/ConfigError or TimeoutError.
  explicit Session(TransportPtr link, ConnectOptions options = {});
  static Session connect(const std::string& address, ConnectOptions options = {});

  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;
  ~Session();

  /// Latest snapshot. Throws SessionDeadError once the receiver stopped.
  MeasurementState read_state() const;
  /// As read_state(), but throws TimeoutError if the newest tick is older
  /// than `max_age` (a transient condition, unlike a dead session).
  MeasurementState read_state(std::chrono::milliseconds max_age) const;

  /// Snapshot taken exactly at the tick that brings the tick count to
  /// `ticks` (or the current one if already past).
  MeasurementState wait_for_ticks(std::uint64_t ticks, std::chrono::milliseconds timeout) const;

  /// Two snapshots: the next tick and the first tick at least `span` of
  /// device time later.
  std::pair<MeasurementState, MeasurementState> measure_interval(
      std::chrono::microseconds span, std::chrono::milliseconds timeout) const;

  /// Queues `c` and asks the device to flag its next sensor-0 sample.
  void mark(char c);
  std::vector<MarkerEvent> markers() const;

  /// Starts writing one line per received tick. A nonzero `max_records`
  /// ends the dump by itself after that many lines; see wait_dump().
  void start_dump(const std::filesystem::path& path, std::uint64_t max_records = 0);
  void start_dump(std::unique_ptr<std::ostream> sink, std::uint64_t max_records = 0);
  /// Waits until a limited dump has written all its records. Returns false
  /// on timeout.
  bool wait_dump(std::chrono::milliseconds timeout) const;
  /// Flushes and closes the dump; rethrows a sink failure seen while dumping.
  void stop_dump();
  bool dumping() const;

  ConfigBlock get_config() const;
  /// Validates locally, writes, reads back and compares. Streaming pauses
  /// during the exchange.
  void set_config(const ConfigBlock& block);

  /// Raw level statistics over the next `ticks` ticks.
  RawCapture capture_raw(std::uint64_t ticks, std::chrono::milliseconds timeout);

  std::string version();

  /// Stops the stream and the receiver. The session is dead afterwards.
  void stop_stream();
  void reboot(bool to_dfu = false);

  bool alive() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ps3
