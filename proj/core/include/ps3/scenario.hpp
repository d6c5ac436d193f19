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
#include <variant>
#include <vector>

namespace ps3 {

struct ConstantLoad {
  double amps = 0.0;
  double volts = 0.0;
};

/// Periodic two-level current. Each period starts in the low state and
/// switches to the high state for the final `duty` fraction of the period.
struct SquareWaveLoad {
  double low_amps = 0.0;
  double high_amps = 0.0;
  double freq_hz = 100.0;
  double duty = 0.5;
  double volts = 0.0;
};

struct TracePoint {
  double time_s = 0.0;
  double amps = 0.0;
  double volts = 0.0;
};

/// Step-hold playback: the value of the last breakpoint at or before t.
/// Times before the first breakpoint hold the first value.
struct TraceLoad {
  std::vector<TracePoint> points;
};

using LoadScenario = std::variant<ConstantLoad, SquareWaveLoad, TraceLoad>;

struct LoadSample {
  double amps = 0.0;
  double volts = 0.0;
};

/// Throws ConfigError on a zero/negative frequency, a duty outside (0, 1),
/// or trace times that are not strictly increasing.
void validate_scenario(const LoadScenario& scenario);

LoadSample evaluate(const LoadScenario& scenario, double t_seconds);

/// Parses "constant <A> <V>", "square <lowA> <highA> <Hz> <duty> <V>" or
/// "trace <t:A:V>[,<t:A:V>...]".
LoadScenario parse_scenario(const std::string& text);

/// Reads a CSV trace of `time_s,amps,volts` lines ('#' comments allowed).
TraceLoad load_trace_csv(const std::string& path);

std::string describe(const LoadScenario& scenario);

}  // namespace ps3
