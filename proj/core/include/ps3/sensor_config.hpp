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
#include <cstddef>
#include <cstdint>
#include <string>

namespace ps3 {

enum class SensorKind : std::uint8_t { kCurrent = 0, kVoltage = 1 };

/// One virtual-EEPROM record. For current sensors `slope` is the sensitivity
/// in V/A; for voltage sensors it is the gain (ADC volts per bus volt).
/// `offset` is in volts at the ADC input.
struct SensorConfig {
  std::string name;
  float vref = 3.3f;
  float slope = 0.165f;
  float offset = 0.0f;
  SensorKind kind = SensorKind::kCurrent;
  bool enabled = true;

  friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

inline constexpr std::size_t kMaxNameLength = 11;

using ConfigBlock = std::array<SensorConfig, 8>;

/// Throws ConfigError when a record is invalid on its own.
void validate_sensor(const SensorConfig& cfg, std::size_t index);

/// Checks every record plus the pairing rule: sensor 2p is the current
/// sensor and 2p+1 the voltage sensor of pair p.
void validate_block(const ConfigBlock& block);

/// A pair only produces power when both of its sensors are enabled.
bool pair_enabled(const ConfigBlock& block, std::size_t pair);

std::size_t enabled_sensor_count(const ConfigBlock& block);

/// Factory block: four pairs (12 V, 3.3 V, 12 V external, 20 V USB-C), all
/// enabled, uncalibrated.
ConfigBlock default_config_block();

}  // namespace ps3
