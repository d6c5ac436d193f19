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

#include "ps3/sensor_config.hpp"

#include <cmath>
#include <string>

#include "ps3/error.hpp"

namespace ps3 {

void validate_sensor(const SensorConfig& cfg, std::size_t index) {
  const auto where = "sensor " + std::to_string(index) + ": ";
  if (cfg.name.size() > kMaxNameLength)
    throw ConfigError(where + "name longer than " + std::to_string(kMaxNameLength) + " characters");
  for (char c : cfg.name) {
    if (c == '\0' || static_cast<unsigned char>(c) > 0x7f)
      throw ConfigError(where + "name must be printable ASCII");
  }
  if (!std::isfinite(cfg.vref) || !(cfg.vref > 0.0f))
    throw ConfigError(where + "vref must be positive");
  if (!std::isfinite(cfg.slope) || cfg.slope == 0.0f)
    throw ConfigError(where + "slope must be nonzero");
  if (!std::isfinite(cfg.offset))
    throw ConfigError(where + "offset must be finite");
}

void validate_block(const ConfigBlock& block) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    validate_sensor(block[i], i);
    const auto expected = i % 2 == 0 ? SensorKind::kCurrent : SensorKind::kVoltage;
    if (block[i].kind != expected) {
      throw ConfigError("sensor " + std::to_string(i) + ": pair " + std::to_string(i / 2) +
                        " must be (current, voltage)");
    }
  }
}

bool pair_enabled(const ConfigBlock& block, std::size_t pair) {
  return block[2 * pair].enabled && block[2 * pair + 1].enabled;
}

std::size_t enabled_sensor_count(const ConfigBlock& block) {
  std::size_t n = 0;
  for (const auto& s : block) n += s.enabled ? 1 : 0;
  return n;
}

ConfigBlock default_config_block() {
  struct Rail {
    const char* name;
    float sensitivity;
    float gain;
  };
  // Gains keep each nominal bus voltage below vref.
  constexpr Rail rails[] = {
      {"pcie12V", 0.165f, 0.25f},
      {"pcie3V3", 0.165f, 0.8f},
      {"ext12V", 0.0825f, 0.25f},
      {"usbc20V", 0.165f, 0.15f},
  };
  ConfigBlock block;
  for (std::size_t p = 0; p < 4; ++p) {
    auto& cur = block[2 * p];
    auto& vol = block[2 * p + 1];
    cur.name = std::string(rails[p].name) + "-I";
    cur.kind = SensorKind::kCurrent;
    cur.slope = rails[p].sensitivity;
    vol.name = std::string(rails[p].name) + "-U";
    vol.kind = SensorKind::kVoltage;
    vol.slope = rails[p].gain;
  }
  return block;
}

}  // namespace ps3
