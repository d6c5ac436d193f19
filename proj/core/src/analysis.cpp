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

#include "ps3/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string_view>

#include "ps3/error.hpp"

namespace ps3 {

double power_error(const ErrorBudget& b) {
  if (b.Eu < 0 || b.Ei < 0 || b.U < 0 || b.I < 0)
    throw AnalysisError("error budget fields must be non-negative");
  const double a = b.U * b.Ei;
  const double c = b.I * b.Eu;
  const double d = b.Ei * b.Eu;
  return std::sqrt(a * a + c * c + d * d);
}

void RunningStats::add(double x) {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::std() const { return std::sqrt(variance()); }

std::vector<double> decimate(std::span<const double> series, std::size_t factor) {
  if (factor < 1) throw AnalysisError("decimation factor must be at least 1");
  std::vector<double> out;
  out.reserve(series.size() / factor);
  for (std::size_t i = 0; i + factor <= series.size(); i += factor) {
    double sum = 0.0;
    for (std::size_t j = 0; j < factor; ++j) sum += series[i + j];
    out.push_back(sum / static_cast<double>(factor));
  }
  return out;
}

DecimationStats decimate_stats(std::span<const double> series, std::size_t factor,
                               double rate_hz) {
  if (series.empty()) throw AnalysisError("empty series");
  if (factor < 1) throw AnalysisError("decimation factor must be at least 1");
  if (series.size() < 2 * factor)
    throw AnalysisError("series too short for two blocks at factor " + std::to_string(factor));
  RunningStats stats;
  for (double v : decimate(series, factor)) stats.add(v);
  DecimationStats out;
  out.factor = factor;
  out.out_rate = rate_hz / static_cast<double>(factor);
  out.min = stats.min();
  out.max = stats.max();
  out.pp = out.max - out.min;
  out.std = stats.std();
  out.points = stats.count();
  return out;
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return (lower + upper) / 2.0;
}

// Robust sigma from the median absolute deviation.
double mad_sigma(std::span<const double> v, double centre) {
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [&](double x) { return std::abs(x - centre); });
  return 1.4826 * median(std::move(dev));
}

std::vector<StepEdge> find_edges(std::span<const double> s, double mid) {
  std::vector<StepEdge> edges;
  if (s.empty()) return edges;
  bool above = s[0] >= mid;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool now = s[i] >= mid;
    if (now != above) edges.push_back({i, now});
    above = now;
  }
  return edges;
}

// Fractional index where the series crosses `level` between i-1 and i.
double interpolate(std::span<const double> s, std::size_t i, double level) {
  const double a = s[i - 1];
  const double b = s[i];
  if (b == a) return static_cast<double>(i);
  return static_cast<double>(i - 1) + (level - a) / (b - a);
}

}  // namespace

RiseTime rise_time(std::span<const double> series, double rate_hz, double low_frac,
                   double high_frac) {
  if (!(rate_hz > 0)) throw AnalysisError("sample rate must be positive");
  if (!(0 < low_frac && low_frac < high_frac && high_frac < 1))
    throw AnalysisError("rise-time fractions must satisfy 0 < low < high < 1");
  const std::size_t quarter = series.size() / 4;
  if (quarter < 1) throw AnalysisError("no step found: series too short");

  const auto head = series.first(quarter);
  const auto tail = series.last(quarter);
  const double low = median({head.begin(), head.end()});
  const double high = median({tail.begin(), tail.end()});
  const double step = high - low;
  const double noise = std::max(mad_sigma(head, low), mad_sigma(tail, high));
  if (!(step > 0) || step <= 5 * noise) throw AnalysisError("no step found");

  const double mid = low + step / 2;
  RiseTime out;
  out.low_level = low;
  out.high_level = high;
  out.edges = find_edges(series, mid);
  const auto first = std::find_if(out.edges.begin(), out.edges.end(),
                                  [](const StepEdge& e) { return e.rising; });
  if (first == out.edges.end()) throw AnalysisError("no step found");

  const double lo_level = low + low_frac * step;
  const double hi_level = low + high_frac * step;
  const std::size_t k = first->index;

  // Last sample below the low threshold at or before the edge.
  std::size_t j = k;
  while (j > 0 && series[j - 1] >= lo_level) --j;
  if (j == 0) throw AnalysisError("no step found: low threshold never undercut");
  out.t_low = interpolate(series, j, lo_level);

  std::size_t h = k;
  while (h < series.size() && series[h] < hi_level) ++h;
  if (h == series.size()) throw AnalysisError("no step found: high threshold never reached");
  out.t_high = series[h - 1] >= hi_level ? static_cast<double>(h - 1)
                                         : interpolate(series, h, hi_level);
  out.seconds = (out.t_high - out.t_low) / rate_hz;
  return out;
}

RiseTime step_response(std::span<const double> series, double rate_hz, double low_frac,
                       double high_frac) {
  if (series.size() < 8) throw AnalysisError("no step found: series too short");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const auto pct = [&](double q) {
    return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
  };
  const double mid = (pct(0.05) + pct(0.95)) / 2;
  const auto edges = find_edges(series, mid);

  // First rising edge with room for a pre-step plateau.
  std::size_t e = 0;
  while (e < edges.size() && !(edges[e].rising && edges[e].index >= 4)) ++e;
  if (e == edges.size()) return rise_time(series, rate_hz, low_frac, high_frac);

  const std::size_t k = edges[e].index;
  const std::size_t before = e > 0 ? k - edges[e - 1].index : k;
  const std::size_t after = e + 1 < edges.size() ? edges[e + 1].index - k : series.size() - k;
  const std::size_t half = std::min(before, after);
  const std::size_t start = k - half;
  auto r = rise_time(series.subspan(start, 2 * half), rate_hz, low_frac, high_frac);
  r.t_low += static_cast<double>(start);
  r.t_high += static_cast<double>(start);
  r.edges = edges;
  return r;
}

// --- dump files ------------------------------------------------------------

std::vector<double> Dump::total_watts() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.total_watts);
  return out;
}

std::optional<std::size_t> Dump::find_marker(char marker) const {
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].marker == marker) return i;
  return std::nullopt;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Parses a decimal with at most `decimals` fraction digits as an integer
// scaled by 10^decimals.
std::optional<std::int64_t> parse_fixed(std::string_view s, int decimals) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const auto whole = s.substr(0, dot);
  auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() || static_cast<int>(frac.size()) > decimals) return std::nullopt;
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), v);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
  for (int i = 0; i < decimals; ++i) {
    int digit = 0;
    if (static_cast<std::size_t>(i) < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') return std::nullopt;
      digit = frac[i] - '0';
    }
    v = v * 10 + digit;
  }
  return negative ? -v : v;
}

std::optional<DumpSample> parse_line(std::string_view line, std::string& why) {
  const auto f = split_ws(line);
  constexpr std::size_t kFields = 2 + 3 * kMaxPairs + 1;
  if (f.empty() || f[0] != "S") {
    why = "expected a line starting with 'S'";
    return std::nullopt;
  }
  if (f.size() != kFields && f.size() != kFields + 1) {
    why = "expected " + std::to_string(kFields) + " fields, got " + std::to_string(f.size());
    return std::nullopt;
  }
  DumpSample s;
  const auto t = parse_fixed(f[1], 6);
  if (!t) {
    why = "bad time field '" + std::string(f[1]) + "'";
    return std::nullopt;
  }
  s.time_us = *t;
  for (std::size_t p = 0; p < kMaxPairs; ++p) {
    const auto v = f[2 + 3 * p], a = f[3 + 3 * p], w = f[4 + 3 * p];
    if (v == "-" && a == "-" && w == "-") continue;
    const auto dv = parse_double(v), da = parse_double(a), dw = parse_double(w);
    if (!dv || !da || !dw) {
      why = "bad value in pair " + std::to_string(p);
      return std::nullopt;
    }
    s.pairs[p] = DumpPair{*dv, *da, *dw};
  }
  const auto total = f[kFields - 1];
  const auto tw = parse_fixed(total, 4);
  const auto td = parse_double(total);
  if (!tw || !td) {
    why = "bad total field '" + std::string(total) + "'";
    return std::nullopt;
  }
  s.total_watts_e4 = *tw;
  s.total_watts = *td;
  if (f.size() == kFields + 1) {
    const auto m = f[kFields];
    if (m.size() != 2 || m[0] != 'M') {
      why = "bad marker field '" + std::string(m) + "'";
      return std::nullopt;
    }
    s.marker = m[1];
  }
  return s;
}

}  // namespace

Dump read_dump(std::istream& in) {
  Dump dump;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    if (line[0] == '#') {
      dump.header.push_back(line);
      continue;
    }
    std::string why;
    auto s = parse_line(line, why);
    if (!s) {
      dump.warnings.push_back({n, why});
      continue;
    }
    if (!dump.samples.empty() && s->time_us < dump.samples.back().time_us) {
      dump.warnings.push_back({n, "time goes backwards"});
      continue;
    }
    s->line = n;
    dump.samples.push_back(*s);
  }
  return dump;
}

Dump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("cannot open dump " + path.string());
  return read_dump(in);
}

IntervalEnergy integrate(const Dump& dump, std::size_t first, std::size_t last) {
  if (first > last || last > dump.samples.size())
    throw AnalysisError("integration range out of bounds");
  // 1e-4 W x 1 us = 1e-10 J.
  std::int64_t acc = 0;
  const std::size_t end = std::min(last, dump.samples.empty() ? 0 : dump.samples.size() - 1);
  for (std::size_t i = first; i < end; ++i) {
    const auto& s = dump.samples[i];
    acc += s.total_watts_e4 * (dump.samples[i + 1].time_us - s.time_us);
  }
  IntervalEnergy out;
  out.joules = static_cast<double>(acc) * 1e-10;
  if (first < last && last <= dump.samples.size()) {
    const auto t_end = last < dump.samples.size() ? dump.samples[last].time_us
                                                  : dump.samples[end].time_us;
    out.seconds = static_cast<double>(t_end - dump.samples[first].time_us) * 1e-6;
  }
  out.watts = out.seconds > 0 ? out.joules / out.seconds : 0.0;
  return out;
}

IntervalEnergy energy_between_markers(const Dump& dump, char m1, char m2) {
  const auto a = dump.find_marker(m1);
  if (!a) throw AnalysisError(std::string("marker '") + m1 + "' not found");
  const auto b = dump.find_marker(m2);
  if (!b) throw AnalysisError(std::string("marker '") + m2 + "' not found");
  if (*b < *a)
    throw AnalysisError(std::string("marker '") + m2 + "' precedes marker '" + m1 + "'");
  return integrate(dump, *a, *b);
}

DumpSummary summarize(const Dump& dump) {
  DumpSummary out;
  out.warnings = dump.warnings.size();
  std::array<RunningStats, kMaxPairs> pair;
  std::array<bool, kMaxPairs> seen{};
  std::array<double, kMaxPairs> pair_joules{};
  RunningStats total;
  const auto& s = dump.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double dt =
        i + 1 < s.size() ? static_cast<double>(s[i + 1].time_us - s[i].time_us) * 1e-6 : 0.0;
    total.add(s[i].total_watts);
    for (std::size_t p = 0; p < kMaxPairs; ++p) {
      if (!s[i].pairs[p]) continue;
      seen[p] = true;
      pair[p].add(s[i].pairs[p]->watts);
      pair_joules[p] += s[i].pairs[p]->watts * dt;
    }
  }
  const auto to_stats = [](const RunningStats& r, double joules) {
    SeriesStats st;
    st.count = r.count();
    st.mean = r.mean();
    st.min = r.min();
    st.max = r.max();
    st.pp = r.max() - r.min();
    st.std = r.std();
    st.joules = joules;
    return st;
  };
  for (std::size_t p = 0; p < kMaxPairs; ++p)
    if (seen[p]) out.pairs[p] = to_stats(pair[p], pair_joules[p]);
  out.total = to_stats(total, integrate(dump, 0, s.size()).joules);
  if (s.size() > 1) out.seconds = static_cast<double>(s.back().time_us - s.front().time_us) * 1e-6;
  return out;
}

std::vector<MarkerInterval> marker_intervals(const Dump& dump) {
  std::vector<MarkerInterval> out;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < dump.samples.size(); ++i) {
    if (!dump.samples[i].marker) continue;
    if (prev) {
      MarkerInterval m;
      m.from = *dump.samples[*prev].marker;
      m.to = *dump.samples[i].marker;
      m.start_s = static_cast<double>(dump.samples[*prev].time_us) * 1e-6;
      m.energy = integrate(dump, *prev, i);
      out.push_back(m);
    }
    prev = i;
  }
  return out;
}

// --- report formatting -------------------------------------------------------

namespace {

std::string printf_string(const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::max(0, std::min<int>(n, sizeof buf - 1))));
}

std::string stats_row(const std::string& name, const SeriesStats& s, bool csv) {
  if (csv)
    return printf_string("%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", name.c_str(), s.count, s.mean,
                         s.min, s.max, s.pp, s.std, s.joules);
  return printf_string("%-6s %8zu %10.4f %10.4f %10.4f %10.4f %10.4f %12.6f\n", name.c_str(),
                       s.count, s.mean, s.min, s.max, s.pp, s.std, s.joules);
}

}  // namespace

std::string format_summary(const DumpSummary& s, bool csv) {
  std::string out = csv ? "series,count,mean_w,min_w,max_w,pp_w,std_w,joules\n"
                        : printf_string("%-6s %8s %10s %10s %10s %10s %10s %12s\n", "series",
                                        "count", "mean W", "min W", "max W", "pp W", "std W", "J");
  for (std::size_t p = 0; p < kMaxPairs; ++p)
    if (s.pairs[p]) out += stats_row("pair" + std::to_string(p), *s.pairs[p], csv);
  out += stats_row("total", s.total, csv);
  if (!csv) out += printf_string("duration %.6f s, %zu warnings\n", s.seconds, s.warnings);
  return out;
}

std::string format_decimation(std::span<const DecimationStats> rows, bool csv) {
  std::string out = csv ? "factor,rate_hz,points,min_w,max_w,pp_w,std_w\n"
                        : printf_string("%6s %10s %8s %10s %10s %10s %10s\n", "factor", "rate Hz",
                                        "points", "min W", "max W", "pp W", "std W");
  for (const auto& r : rows) {
    out += csv ? printf_string("%zu,%.3f,%zu,%.6f,%.6f,%.6f,%.6f\n", r.factor, r.out_rate, r.points,
                               r.min, r.max, r.pp, r.std)
               : printf_string("%6zu %10.1f %8zu %10.4f %10.4f %10.4f %10.4f\n", r.factor,
                               r.out_rate, r.points, r.min, r.max, r.pp, r.std);
  }
  return out;
}

std::string format_rise_time(const RiseTime& r, double rate_hz, bool csv) {
  const double t0 = r.t_low / rate_hz;
  if (csv)
    return "rise_s,low_w,high_w,start_s,edges\n" +
           printf_string("%.9f,%.6f,%.6f,%.9f,%zu\n", r.seconds, r.low_level, r.high_level, t0,
                         r.edges.size());
  return printf_string("rise time %.3f us  low %.4f W  high %.4f W  at %.6f s  (%zu edges)\n",
                       r.seconds * 1e6, r.low_level, r.high_level, t0, r.edges.size());
}

std::string format_marker_intervals(std::span<const MarkerInterval> rows, bool csv) {
  std::string out = csv ? "from,to,start_s,seconds,joules,watts\n"
                        : printf_string("%-4s %-4s %12s %12s %14s %10s\n", "from", "to", "start s",
                                        "seconds", "J", "W");
  for (const auto& m : rows) {
    out += csv ? printf_string("%c,%c,%.6f,%.6f,%.9f,%.6f\n", m.from, m.to, m.start_s,
                               m.energy.seconds, m.energy.joules, m.energy.watts)
               : printf_string("%-4c %-4c %12.6f %12.6f %14.6f %10.4f\n", m.from, m.to, m.start_s,
                               m.energy.seconds, m.energy.joules, m.energy.watts);
  }
  return out;
}

}  // namespace ps3
