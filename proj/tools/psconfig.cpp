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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "ps3/calibrate.hpp"
#include "ps3/host.hpp"

namespace {

using namespace ps3;

void print_block(const ConfigBlock& block) {
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto& s = block[i];
    std::printf("%zu name=%s kind=%s vref=%.6g slope=%.6g offset=%.6g enabled=%d\n", i,
                s.name.empty() ? "-" : s.name.c_str(),
                s.kind == SensorKind::kCurrent ? "current" : "voltage",
                static_cast<double>(s.vref), static_cast<double>(s.slope),
                static_cast<double>(s.offset), s.enabled ? 1 : 0);
  }
}

float parse_float(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  float f = 0;
  try {
    f = std::stof(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw CLI::ValidationError(key, "not a number: " + v);
  return f;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw CLI::ValidationError(key, "not a boolean: " + v);
}

// Applies one `N.key=value` assignment.
void apply(ConfigBlock& block, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw CLI::ValidationError(assignment, "expected <sensor>.<key>=<value>");
  const auto index_text = assignment.substr(0, dot);
  const auto key = assignment.substr(dot + 1, eq - dot - 1);
  const auto value = assignment.substr(eq + 1);
  std::size_t index = 0;
  try {
    std::size_t used = 0;
    index = std::stoul(index_text, &used);
    if (used != index_text.size()) throw std::invalid_argument(index_text);
  } catch (const std::exception&) {
    throw CLI::ValidationError(assignment, "bad sensor index " + index_text);
  }
  if (index >= kMaxSensors)
    throw CLI::ValidationError(assignment, "unknown sensor " + index_text + " (0-7)");
  auto& s = block[index];
  if (key == "name") {
    s.name = value;
  } else if (key == "vref") {
    s.vref = parse_float(assignment, value);
  } else if (key == "slope") {
    s.slope = parse_float(assignment, value);
  } else if (key == "offset") {
    s.offset = parse_float(assignment, value);
  } else if (key == "enabled") {
    s.enabled = parse_bool(assignment, value);
  } else if (key == "type" || key == "kind") {
    if (value == "current") {
      s.kind = SensorKind::kCurrent;
    } else if (value == "voltage") {
      s.kind = SensorKind::kVoltage;
    } else {
      throw CLI::ValidationError(assignment, "type must be current or voltage");
    }
  } else {
    throw CLI::ValidationError(assignment, "unknown key " + key);
  }
}

bool confirm(const std::string& prompt) {
  std::fprintf(stderr, "%s Continue? [Y/n] ", prompt.c_str());
  std::string line;
  if (!std::getline(std::cin, line)) return false;
  return line.empty() || line == "y" || line == "Y" || line == "yes";
}

void print_result(const CalibrationResult& r, const char* unit) {
  for (std::size_t i = 0; i < kMaxSensors; ++i)
    if (r.value[i])
      std::printf("%zu %.6f %s  (+/- %.2g)\n", i, *r.value[i], unit, r.uncertainty[i]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Read or write the sensor configuration", "psconfig"};
  app.require_subcommand(1);
  std::string address = tools::kDefaultAddress;
  tools::add_address_option(app, address);

  auto* show = app.add_subcommand("show", "Print the configuration block");

  auto* set = app.add_subcommand("set", "Write values, e.g. 0.vref=3.3 1.name=pcie12V-U");
  std::vector<std::string> assignments;
  bool reboot = false;
  set->add_option("assignment", assignments, "<sensor>.<key>=<value>; keys: name vref slope "
                  "offset type enabled")->required();
  set->add_flag("--reboot", reboot, "Reboot the device after writing");

  auto* cal = app.add_subcommand("calibrate", "Zero-load offset or voltage-gain calibration");
  std::string what;
  double known_volts = 0;
  std::uint64_t samples = kCalibrationSamples;
  bool yes = false;
  cal->add_option("what", what, "offset | gain")->required()->check(CLI::IsMember({"offset", "gain"}));
  cal->add_option("--known-volts", known_volts, "Bus voltage applied for gain calibration");
  cal->add_option("--samples", samples, "Samples to average")->capture_default_str();
  cal->add_flag("-y,--yes", yes, "Do not prompt before measuring");

  return tools::run_tool(app, argc, argv, [&]() -> int {
    auto session = Session::connect(address);
    if (*show) {
      print_block(session.get_config());
      return tools::kOk;
    }
    if (*set) {
      auto block = session.get_config();
      for (const auto& a : assignments) apply(block, a);
      try {
        validate_block(block);
      } catch (const ConfigError& e) {
        throw CLI::ValidationError("set", e.what());
      }
      session.set_config(block);
      if (reboot) session.reboot();
      return tools::kOk;
    }
    if (what == "offset") {
      if (!yes && !confirm("Remove all load from the sensors.")) return tools::kUsage;
      print_result(calibrate_offsets(session, samples), "V");
    } else {
      if (!(known_volts > 0)) {
        std::fprintf(stderr, "psconfig: --known-volts must be positive\n");
        return tools::kUsage;
      }
      if (!yes && !confirm("Apply " + std::to_string(known_volts) + " V to every bus."))
        return tools::kUsage;
      print_result(calibrate_voltage_gain(session, known_volts, samples), "V/V");
    }
    return tools::kOk;
  });
}
