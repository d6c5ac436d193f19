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
#include <cstdint>
#include <optional>

#include "ps3/host.hpp"

namespace ps3 {

inline constexpr std::uint64_t kCalibrationSamples = 131072;

struct CalibrationResult {
  /// New value per sensor; empty for sensors the routine did not touch.
  std::array<std::optional<double>, kMaxSensors> value{};
  /// Standard error of the mean, in the same unit as `value`.
  std::array<double, kMaxSensors> uncertainty{};
  std::uint64_t samples = 0;
};

/// Zero-load Hall offset per enabled current sensor, in ADC volts:
/// mean(adc) - vref/2. Writes the offsets through set_config unless any of
/// them exceeds 10% of vref, in which case nothing is written.
CalibrationResult calibrate_offsets(Session& session, std::uint64_t samples = kCalibrationSamples);

/// Voltage gain per enabled voltage sensor against a known bus voltage:
/// (mean(adc) - offset) / known_volts. Stored in the slope field.
CalibrationResult calibrate_voltage_gain(Session& session, double known_volts,
                                         std::uint64_t samples = kCalibrationSamples);

}  // namespace ps3
