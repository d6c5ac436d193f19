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

#include "ps3/sim_config.hpp"

#include <fstream>
#include <sstream>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::size_t to_index(const std::string& v, std::size_t limit, const std::string& key) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos ||
      std::stoul(v) >= limit)
    throw ConfigError(key + ": index out of range");
  return std::stoul(v);
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

void set_sensor_field(SensorConfig& cfg, const std::string& field, const std::string& value,
                      const std::string& key, bool allow_identity) {
  if (field == "vref")
    cfg.vref = static_cast<float>(to_double(value, key));
  else if (field == "slope")
    cfg.slope = static_cast<float>(to_double(value, key));
  else if (field == "offset")
    cfg.offset = static_cast<float>(to_double(value, key));
  else if (allow_identity && field == "name")
    cfg.name = value;
  else if (allow_identity && field == "enabled")
    cfg.enabled = to_bool(value, key);
  else
    throw ConfigError("unknown key '" + key + "'");
}

}  // namespace

SimulatorSpec parse_sim_config(const std::string& text) {
  SimulatorSpec spec;
  ConfigBlock hardware = spec.device.eeprom;
  bool hardware_touched = false;
  // hardware.* overrides apply on top of the final EEPROM block.
  std::vector<std::tuple<std::size_t, std::string, std::string, std::string>> hw_edits;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    std::vector<std::string> parts;
    std::stringstream ks(key);
    for (std::string p; std::getline(ks, p, '.');) parts.push_back(p);

    if (key == "clock") {
      if (value == "realtime")
        spec.runner.mode = ClockMode::kRealtime;
      else if (value == "accelerated")
        spec.runner.mode = ClockMode::kAccelerated;
      else
        throw ConfigError("clock: expected realtime or accelerated");
    } else if (key == "seed") {
      spec.device.noise.seed = static_cast<std::uint64_t>(to_double(value, key));
    } else if (key == "noise.current_rms") {
      spec.device.noise.current_rms = to_double(value, key);
    } else if (key == "noise.voltage_rms") {
      spec.device.noise.voltage_rms = to_double(value, key);
    } else if (key == "eeprom") {
      spec.device.eeprom_file = value;
    } else if (key == "load") {
      spec.device.loads[0] = parse_scenario(value);
    } else if (parts.size() == 3 && parts[0] == "pair" && parts[2] == "load") {
      spec.device.loads[to_index(parts[1], kMaxPairs, key)] = parse_scenario(value);
    } else if (parts.size() == 3 && parts[0] == "sensor") {
      auto& cfg = spec.device.eeprom[to_index(parts[1], kMaxSensors, key)];
      set_sensor_field(cfg, parts[2], value, key, true);
    } else if (parts.size() == 3 && parts[0] == "hardware") {
      hw_edits.emplace_back(to_index(parts[1], kMaxSensors, key), parts[2], value, key);
      hardware_touched = true;
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (hardware_touched) {
    hardware = spec.device.eeprom;
    for (const auto& [idx, field, value, key] : hw_edits)
      set_sensor_field(hardware[idx], field, value, key, false);
    spec.device.hardware = hardware;
  }
  validate_block(spec.device.eeprom);
  spec.device.mode = spec.runner.mode;
  return spec;
}

SimulatorSpec load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open simulator config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sim_config(ss.str());
}

}  // namespace ps3
