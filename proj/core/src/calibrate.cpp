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

#include "ps3/calibrate.hpp"

#include <cmath>
#include <string>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

RawCapture capture(Session& session, std::uint64_t samples) {
  if (samples == 0) throw CalibrationError("calibration needs at least one sample");
  if (session.dumping()) throw CalibrationError("refusing to calibrate while a dump is active");
  // One tick per 50 us of device time; allow realtime devices plenty of slack.
  const auto timeout = std::chrono::milliseconds(5000 + samples / 10);
  return session.capture_raw(samples, timeout);
}

double mean_adc(const RawCapture& raw, std::size_t i, double vref) {
  return level_to_adc_volts(raw.mean_level[i], vref);
}

double sem_adc(const RawCapture& raw, std::size_t i, double vref) {
  return level_to_adc_volts(raw.std_level[i], vref) / std::sqrt(static_cast<double>(raw.count[i]));
}

}  // namespace

CalibrationResult calibrate_offsets(Session& session, std::uint64_t samples) {
  auto block = session.get_config();
  const auto raw = capture(session, samples);

  CalibrationResult result;
  result.samples = samples;
  for (std::size_t i = 0; i < kMaxSensors; ++i) {
    auto& s = block[i];
    if (!s.enabled || s.kind != SensorKind::kCurrent) continue;
    const double vref = s.vref;
    const double offset = mean_adc(raw, i, vref) - vref / 2.0;
    if (std::abs(offset) > 0.1 * vref)
      throw CalibrationError("sensor " + std::to_string(i) + " offset " + std::to_string(offset) +
                             " V exceeds 10% of vref; is a load connected?");
    result.value[i] = offset;
    result.uncertainty[i] = sem_adc(raw, i, vref);
  }
  for (std::size_t i = 0; i < kMaxSensors; ++i)
    if (result.value[i]) block[i].offset = static_cast<float>(*result.value[i]);
  session.set_config(block);
  return result;
}

CalibrationResult calibrate_voltage_gain(Session& session, double known_volts,
                                         std::uint64_t samples) {
  if (!(known_volts > 0.0)) throw CalibrationError("known voltage must be positive");
  auto block = session.get_config();
  const auto raw = capture(session, samples);

  CalibrationResult result;
  result.samples = samples;
  for (std::size_t i = 0; i < kMaxSensors; ++i) {
    auto& s = block[i];
    if (!s.enabled || s.kind != SensorKind::kVoltage) continue;
    const double level = raw.mean_level[i];
    if (level <= 0.5 || level >= kMaxLevel - 0.5)
      throw CalibrationError("sensor " + std::to_string(i) +
                             " reads at the ADC rail; check the wiring");
    const double vref = s.vref;
    result.value[i] = (mean_adc(raw, i, vref) - s.offset) / known_volts;
    result.uncertainty[i] = sem_adc(raw, i, vref) / known_volts;
    if (*result.value[i] <= 0.0)
      throw CalibrationError("sensor " + std::to_string(i) + " yields a non-positive gain");
  }
  for (std::size_t i = 0; i < kMaxSensors; ++i)
    if (result.value[i]) block[i].slope = static_cast<float>(*result.value[i]);
  session.set_config(block);
  return result;
}

}  // namespace ps3
