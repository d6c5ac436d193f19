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

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "ps3/analysis.hpp"
#include "ps3/host.hpp"

namespace {

using namespace ps3;
using namespace std::chrono_literals;

int capture(const std::string& address, const std::string& path, double duration, bool markers) {
  auto session = Session::connect(address);
  if (markers) {
    // Each non-space character on stdin becomes a marker; EOF ends the dump.
    session.start_dump(path);
    for (int c; (c = std::getchar()) != EOF;)
      if (std::isgraph(c)) session.mark(static_cast<char>(c));
    session.wait_for_ticks(session.read_state().ticks + 1, 2s);
    session.stop_dump();
    return tools::kOk;
  }
  const auto records = static_cast<std::uint64_t>(std::llround(duration * kStreamRateHz));
  if (records == 0) throw CLI::ValidationError("--duration", "must cover at least one tick");
  session.start_dump(path, records);
  const auto budget = std::chrono::milliseconds(static_cast<std::int64_t>(duration * 1000) + 10000);
  if (!session.wait_dump(budget)) throw TimeoutError("dump did not complete in time");
  session.stop_dump();
  return tools::kOk;
}

Dump load(const std::string& path) {
  auto dump = read_dump(std::filesystem::path(path));
  for (const auto& w : dump.warnings)
    std::fprintf(stderr, "%s:%zu: %s\n", path.c_str(), w.line, w.message.c_str());
  if (dump.samples.empty()) throw AnalysisError(path + ": no data lines");
  return dump;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capture and analyse continuous 20 kHz dumps", "psdump"};
  app.require_subcommand(1);

  auto* cap = app.add_subcommand("capture", "Record a dump from the device");
  std::string address = tools::kDefaultAddress;
  std::string out_path;
  double duration = 1.0;
  bool markers = false;
  tools::add_address_option(*cap, address);
  cap->add_option("-o,--output,-f", out_path, "Dump file to write")->required();
  auto* dur = cap->add_option("-t,--duration", duration, "Seconds of device time")
                  ->capture_default_str()
                  ->check(CLI::PositiveNumber);
  cap->add_flag("--markers", markers,
                "Read marker characters from stdin and stop at end of input")
      ->excludes(dur);

  auto* analyze = app.add_subcommand("analyze", "Analyse a dump file");
  analyze->require_subcommand(1);
  std::string in_path;
  bool csv = false;
  double rate = kStreamRateHz;
  analyze->add_option("-f,--file", in_path, "Dump file")->required();
  analyze->add_flag("--csv", csv, "Emit CSV");
  analyze->add_option("--rate", rate, "Sample rate in Hz")->capture_default_str();

  auto* stats = analyze->add_subcommand("stats", "Per-pair and total power statistics");
  auto* mk = analyze->add_subcommand("markers", "Energy between markers");
  std::string from, to;
  mk->add_option("--from", from, "First marker (with --to: energy between the two)");
  mk->add_option("--to", to, "Second marker");
  auto* step = analyze->add_subcommand("step", "Rise time of the first rising step");
  auto* dec = analyze->add_subcommand("decimate", "Noise statistics after block averaging");
  std::vector<std::size_t> factors;
  dec->add_option("--factor", factors, "Block sizes (repeatable)")->required();

  return tools::run_tool(app, argc, argv, [&]() -> int {
    if (*cap) return capture(address, out_path, duration, markers);

    const auto dump = load(in_path);
    if (*stats) {
      std::fputs(format_summary(summarize(dump), csv).c_str(), stdout);
    } else if (*mk) {
      if (from.empty() != to.empty())
        throw CLI::ValidationError("--from/--to", "give both markers or neither");
      if (!from.empty()) {
        if (from.size() != 1 || to.size() != 1)
          throw CLI::ValidationError("--from/--to", "markers are single characters");
        MarkerInterval m;
        m.from = from[0];
        m.to = to[0];
        m.energy = energy_between_markers(dump, m.from, m.to);
        m.start_s = static_cast<double>(dump.samples[*dump.find_marker(m.from)].time_us) * 1e-6;
        std::fputs(format_marker_intervals({&m, 1}, csv).c_str(), stdout);
      } else {
        const auto rows = marker_intervals(dump);
        std::fputs(format_marker_intervals(rows, csv).c_str(), stdout);
      }
    } else if (*step) {
      const auto series = dump.total_watts();
      std::fputs(format_rise_time(step_response(series, rate), rate, csv).c_str(), stdout);
    } else if (*dec) {
      const auto series = dump.total_watts();
      std::vector<DecimationStats> rows{decimate_stats(series, 1, rate)};
      for (auto f : factors)
        if (f != 1) rows.push_back(decimate_stats(series, f, rate));
      std::fputs(format_decimation(rows, csv).c_str(), stdout);
      if (!csv)
        for (std::size_t i = 1; i < rows.size(); ++i)
          std::printf("std ratio 1/%zu: %.4f (sqrt %zu = %.4f)\n", rows[i].factor,
                      rows[0].std / rows[i].std, rows[i].factor,
                      std::sqrt(static_cast<double>(rows[i].factor)));
    }
    return tools::kOk;
  });
}
