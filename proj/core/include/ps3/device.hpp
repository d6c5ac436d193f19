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
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ps3/protocol.hpp"
#include "ps3/scenario.hpp"
#include "ps3/sensor_config.hpp"

namespace ps3 {

inline constexpr std::uint64_t kTickMicros = 50;
inline constexpr double kSampleRateHz = 1e6 / kTickMicros;
inline constexpr int kSubSamples = 6;
// One ADC conversion is 25 cycles at 24 MHz; 8 channels per averaging round.
inline constexpr std::int64_t kConversionNanos = 1040;
inline constexpr std::int64_t kRoundNanos = 8 * kConversionNanos;
// Timestamp is latched once sub-sample 3 of 6 has been converted.
inline constexpr std::uint64_t kTimestampLatchMicros = 25;

inline constexpr double kDefaultCurrentRms = 0.115;
// 0.2 Wpp at 10 A on the 12 V module, read as 3 sigma of the bus voltage.
inline constexpr double kDefaultVoltageRms = 0.2 / 10.0 / 3.0;

inline constexpr const char* kDeviceVersion = "PowerSensor3-sim 1.0";

/// Gaussian noise added to each ADC sub-sample, referred to the bus.
struct NoiseModel {
  double current_rms = kDefaultCurrentRms;
  double voltage_rms = kDefaultVoltageRms;
  std::uint64_t seed = 1;

  static NoiseModel none() { return {0.0, 0.0, 1}; }
};

enum class ClockMode { kRealtime, kAccelerated };

struct DeviceClock {
  std::uint64_t micros = 0;

  std::uint16_t timestamp() const {
    return static_cast<std::uint16_t>((micros + kTimestampLatchMicros) % 1024);
  }
};

/// Maps a physical value (amps or bus volts) to volts at the ADC input.
double sensor_transfer(double physical, const SensorConfig& cfg);

/// Round-to-nearest conversion of ADC volts to a 10-bit level, clamped.
std::uint16_t quantize(double adc_volts, double vref);

/// Average of six integer sub-samples, ties to even.
std::uint16_t average_subsamples(std::span<const std::uint16_t, kSubSamples> levels);

struct DeviceOptions {
  ConfigBlock eeprom = default_config_block();
  /// Sensor characteristics used to generate samples. Differences from the
  /// EEPROM model uncalibrated hardware. Defaults to the EEPROM contents.
  std::optional<ConfigBlock> hardware;
  std::array<LoadScenario, kMaxPairs> loads{};
  NoiseModel noise;
  ClockMode mode = ClockMode::kAccelerated;
  std::optional<std::filesystem::path> eeprom_file;
};

struct DeviceCounters {
  std::uint64_t ticks = 0;
  std::uint64_t timestamp_frames = 0;
  std::uint64_t sample_frames = 0;
  std::uint64_t markers = 0;
  std::uint64_t unknown_commands = 0;
  std::uint64_t rejected_writes = 0;
};

/// Firmware emulation. Driven by one thread (tick/handle_command); counters,
/// eeprom() and set_load() are safe from other threads.
class VirtualDevice {
 public:
  /// Throws ConfigError for invalid configs, scenarios or EEPROM images.
  explicit VirtualDevice(DeviceOptions options);

  VirtualDevice(const VirtualDevice&) = delete;
  VirtualDevice& operator=(const VirtualDevice&) = delete;

  /// Consumes host bytes, appending any replies to `reply`.
  void handle_command(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& reply);

  /// Produces one 50 us tick of stream bytes; appends nothing when idle.
  void tick(std::vector<std::uint8_t>& out);

  /// Link loss: stop streaming and drop partial commands.
  void reset_link();

  bool streaming() const { return streaming_; }
  bool halted() const { return halted_; }
  std::uint64_t clock_micros() const { return clock_.micros; }
  ClockMode mode() const { return options_.mode; }

  ConfigBlock eeprom() const;
  void set_load(std::size_t pair, LoadScenario scenario);
  DeviceCounters counters() const;

 private:
  void execute(Command cmd, std::vector<std::uint8_t>& reply);
  void commit_write();

  DeviceOptions options_;
  ConfigBlock hardware_;
  DeviceClock clock_;
  bool streaming_ = false;
  bool halted_ = false;
  std::uint64_t pending_markers_ = 0;
  std::optional<std::vector<std::uint8_t>> write_buffer_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};

  mutable std::mutex mu_;  // guards options_.eeprom and options_.loads

  std::atomic<std::uint64_t> ticks_{0};
  std::atomic<std::uint64_t> timestamp_frames_{0};
  std::atomic<std::uint64_t> sample_frames_{0};
  std::atomic<std::uint64_t> markers_{0};
  std::atomic<std::uint64_t> unknown_commands_{0};
  std::atomic<std::uint64_t> rejected_writes_{0};
};

}  // namespace ps3
