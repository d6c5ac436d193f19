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

#include "ps3/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_number(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid " + what + ": '" + token + "'");
  }
}

TracePoint parse_point(const std::string& token) {
  std::stringstream ss(token);
  std::string t, a, v;
  if (!std::getline(ss, t, ':') || !std::getline(ss, a, ':') || !std::getline(ss, v, ':'))
    throw ConfigError("trace point must be t:A:V, got '" + token + "'");
  return {parse_number(t, "trace time"), parse_number(a, "trace amps"),
          parse_number(v, "trace volts")};
}

}  // namespace

void validate_scenario(const LoadScenario& scenario) {
  std::visit(Overloaded{
                 [](const ConstantLoad&) {},
                 [](const SquareWaveLoad& s) {
                   if (!(s.freq_hz > 0.0)) throw ConfigError("square wave frequency must be > 0");
                   if (!(s.duty > 0.0 && s.duty < 1.0))
                     throw ConfigError("square wave duty must be in (0, 1)");
                 },
                 [](const TraceLoad& t) {
                   if (t.points.empty()) throw ConfigError("trace needs at least one point");
                   for (std::size_t i = 1; i < t.points.size(); ++i) {
                     if (!(t.points[i].time_s > t.points[i - 1].time_s))
                       throw ConfigError("trace times must be strictly increasing");
                   }
                 },
             },
             scenario);
}

LoadSample evaluate(const LoadScenario& scenario, double t) {
  return std::visit(
      Overloaded{
          [](const ConstantLoad& c) { return LoadSample{c.amps, c.volts}; },
          [t](const SquareWaveLoad& s) {
            // Instants within 1e-9 periods of an edge count as past the edge,
            // so grid-aligned sample times do not flip on rounding noise.
            constexpr double kEps = 1e-9;
            const double cycles = t * s.freq_hz;
            const double phase = cycles - std::floor(cycles + kEps);
            const bool high = phase >= 1.0 - s.duty - kEps;
            return LoadSample{high ? s.high_amps : s.low_amps, s.volts};
          },
          [t](const TraceLoad& tr) {
            auto it = std::upper_bound(tr.points.begin(), tr.points.end(), t,
                                       [](double x, const TracePoint& p) { return x < p.time_s; });
            const auto& p = it == tr.points.begin() ? tr.points.front() : *std::prev(it);
            return LoadSample{p.amps, p.volts};
          },
      },
      scenario);
}

LoadScenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  std::vector<std::string> args;
  for (std::string tok; in >> tok;) args.push_back(tok);

  LoadScenario result;
  if (kind == "constant") {
    if (args.size() != 2) throw ConfigError("constant load takes <amps> <volts>");
    result = ConstantLoad{parse_number(args[0], "amps"), parse_number(args[1], "volts")};
  } else if (kind == "square") {
    if (args.size() != 5)
      throw ConfigError("square load takes <low_amps> <high_amps> <freq_hz> <duty> <volts>");
    result = SquareWaveLoad{parse_number(args[0], "amps"), parse_number(args[1], "amps"),
                            parse_number(args[2], "frequency"), parse_number(args[3], "duty"),
                            parse_number(args[4], "volts")};
  } else if (kind == "trace") {
    TraceLoad tr;
    for (const auto& arg : args) {
      std::stringstream ss(arg);
      for (std::string tok; std::getline(ss, tok, ',');) {
        if (!tok.empty()) tr.points.push_back(parse_point(tok));
      }
    }
    result = tr;
  } else if (kind == "trace-file") {
    if (args.size() != 1) throw ConfigError("trace-file load takes <path>");
    result = load_trace_csv(args[0]);
  } else {
    throw ConfigError("unknown load kind '" + kind + "'");
  }
  validate_scenario(result);
  return result;
}

TraceLoad load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path);
  TraceLoad tr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ':');
    tr.points.push_back(parse_point(line));
  }
  validate_scenario(tr);
  return tr;
}

std::string describe(const LoadScenario& scenario) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const ConstantLoad& c) { out << "constant " << c.amps << " " << c.volts; },
                 [&](const SquareWaveLoad& s) {
                   out << "square " << s.low_amps << " " << s.high_amps << " " << s.freq_hz << " "
                       << s.duty << " " << s.volts;
                 },
                 [&](const TraceLoad& t) { out << "trace (" << t.points.size() << " points)"; },
             },
             scenario);
  return out.str();
}

}  // namespace ps3
