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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ps3/protocol.hpp"

namespace ps3 {

inline constexpr double kStreamRateHz = 20000.0;

struct ErrorBudget {
  double Eu = 0.0;  ///< voltage reading error, V
  double Ei = 0.0;  ///< current reading error, A
  double U = 0.0;   ///< nominal voltage, V
  double I = 0.0;   ///< maximum current, A
};

/// Worst-case power error sqrt((U*Ei)^2 + (I*Eu)^2 + (Ei*Eu)^2).
/// Throws AnalysisError on a negative field.
double power_error(const ErrorBudget& b);

struct DecimationStats {
  std::size_t factor = 1;
  double out_rate = 0.0;
  double min = 0.0;
  double max = 0.0;
  double pp = 0.0;
  double std = 0.0;
  std::size_t points = 0;
};

/// Means of consecutive non-overlapping blocks; a trailing partial block is
/// dropped.
std::vector<double> decimate(std::span<const double> series, std::size_t factor);

/// Statistics of the block-averaged series (population std).
DecimationStats decimate_stats(std::span<const double> series, std::size_t factor,
                               double rate_hz = kStreamRateHz);

struct StepEdge {
  std::size_t index = 0;  ///< first sample past the midpoint
  bool rising = true;
};

struct RiseTime {
  double seconds = 0.0;
  double low_level = 0.0;
  double high_level = 0.0;
  double t_low = 0.0;   ///< fractional sample index of the low_frac crossing
  double t_high = 0.0;  ///< fractional sample index of the high_frac crossing
  std::vector<StepEdge> edges;
};

/// Rise time of the first rising midpoint crossing. Plateaus are the medians
/// of the first and last quarter of `series`. Throws AnalysisError when no
/// step stands clear of the plateau noise.
RiseTime rise_time(std::span<const double> series, double rate_hz = kStreamRateHz,
                   double low_frac = 0.1, double high_frac = 0.9);

/// Finds the first rising edge of a longer record (e.g. a square wave),
/// cuts a window centred on it between its neighbouring edges, and runs
/// rise_time on that window. Indices in the result refer to `series`.
RiseTime step_response(std::span<const double> series, double rate_hz = kStreamRateHz,
                       double low_frac = 0.1, double high_frac = 0.9);

// --- dump files ------------------------------------------------------------

struct DumpPair {
  double volts = 0.0;
  double amps = 0.0;
  double watts = 0.0;
};

struct DumpSample {
  /// Device time in microseconds, exact for the 6-decimal seconds field.
  std::int64_t time_us = 0;
  std::array<std::optional<DumpPair>, kMaxPairs> pairs{};
  double total_watts = 0.0;
  /// Total watts in units of 1e-4 W, exact for the 4-decimal field.
  std::int64_t total_watts_e4 = 0;
  std::optional<char> marker;
  std::size_t line = 0;
};

struct DumpWarning {
  std::size_t line = 0;
  std::string message;
};

struct Dump {
  std::vector<std::string> header;
  std::vector<DumpSample> samples;
  std::vector<DumpWarning> warnings;

  std::vector<double> total_watts() const;
  /// Index of the first sample carrying `marker`.
  std::optional<std::size_t> find_marker(char marker) const;
};

/// Parses a dump. Malformed lines are skipped and reported in `warnings`.
Dump read_dump(std::istream& in);
Dump read_dump(const std::filesystem::path& path);

struct IntervalEnergy {
  double joules = 0.0;
  double seconds = 0.0;
  double watts = 0.0;  ///< 0 for an empty interval
};

/// Rectangle rule over samples [first, last): each sample's total power
/// times the time to the next sample, accumulated in fixed point so that
/// split intervals sum exactly.
IntervalEnergy integrate(const Dump& dump, std::size_t first, std::size_t last);

/// Energy over [t(m1), t(m2)). Throws AnalysisError when a marker is
/// missing or m2 precedes m1.
IntervalEnergy energy_between_markers(const Dump& dump, char m1, char m2);

struct SeriesStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double pp = 0.0;
  double std = 0.0;
  double joules = 0.0;
};

struct DumpSummary {
  std::array<std::optional<SeriesStats>, kMaxPairs> pairs{};
  SeriesStats total;
  double seconds = 0.0;
  std::size_t warnings = 0;
};

/// Power statistics per enabled pair and for the total, over the full dump.
DumpSummary summarize(const Dump& dump);

/// Accumulates mean and population variance in one pass.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  double std() const;
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// --- report formatting -------------------------------------------------------

std::string format_summary(const DumpSummary& s, bool csv);
std::string format_decimation(std::span<const DecimationStats> rows, bool csv);
std::string format_rise_time(const RiseTime& r, double rate_hz, bool csv);

struct MarkerInterval {
  char from = 0;
  char to = 0;
  double start_s = 0.0;
  IntervalEnergy energy;
};

/// Energy between each pair of consecutive markers in the dump.
std::vector<MarkerInterval> marker_intervals(const Dump& dump);
std::string format_marker_intervals(std::span<const MarkerInterval> rows, bool csv);

}  // namespace ps3
