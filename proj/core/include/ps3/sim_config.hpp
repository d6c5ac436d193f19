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

#include <string>

#include "ps3/device.hpp"
#include "ps3/runner.hpp"

namespace ps3 {

struct SimulatorSpec {
  DeviceOptions device;
  RunnerOptions runner;
};

/// Parses the simulator's key-value configuration text. One `key = value`
/// per line, '#' starts a comment. Recognised keys:
///
///   clock = accelerated | realtime
///   seed = <integer>
///   noise.current_rms = <amps>        noise.voltage_rms = <volts>
///   eeprom = <path of a 224-byte image>
///   load = <scenario>                 (same as pair.0.load)
///   pair.<p>.load = constant <A> <V>
///                 | square <lowA> <highA> <Hz> <duty> <V>
///                 | trace <t:A:V>,<t:A:V>,...
///                 | trace-file <csv path>
///   sensor.<i>.name | vref | slope | offset | enabled = <value>
///   hardware.<i>.vref | slope | offset = <value>
///
/// `sensor.*` keys edit the EEPROM block; `hardware.*` keys override the
/// characteristics the simulated sensor actually has.
SimulatorSpec parse_sim_config(const std::string& text);

SimulatorSpec load_sim_config(const std::string& path);

}  // namespace ps3
