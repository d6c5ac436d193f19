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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ps3/device.hpp"
#include "ps3/error.hpp"
#include "ps3/host.hpp"
#include "ps3/scenario.hpp"
#include "ps3/sim_config.hpp"
#include "sim_support.hpp"

namespace ps3 {
namespace {

using testing::quiet_device;

std::vector<std::uint8_t> command(VirtualDevice& dev, std::string_view cmds) {
  std::vector<std::uint8_t> reply;
  dev.handle_command({reinterpret_cast<const std::uint8_t*>(cmds.data()), cmds.size()}, reply);
  return reply;
}

std::vector<std::uint8_t> run(VirtualDevice& dev, std::size_t ticks) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < ticks; ++i) dev.tick(out);
  return out;
}

// Levels per tick, keyed by sensor index.
struct Tick {
  std::uint16_t micros = 0;
  std::array<std::optional<SampleFrame>, kMaxSensors> frames{};
};

std::vector<Tick> split_ticks(std::span<const std::uint8_t> bytes) {
  DecoderState st;
  std::vector<Tick> ticks;
  for (const auto& ev : decode_stream(bytes, st)) {
    if (const auto* ts = std::get_if<TimestampFrame>(&ev)) {
      ticks.push_back({ts->micros, {}});
    } else {
      const auto& f = std::get<SampleFrame>(ev);
      ticks.back().frames[f.sensor_index] = f;
    }
  }
  EXPECT_EQ(st.discarded, 0u);
  return ticks;
}

TEST(SensorTransfer, Examples) {
  SensorConfig current{"i", 3.3f, 0.165f, 0.0f, SensorKind::kCurrent, true};
  SensorConfig voltage{"u", 3.3f, 0.25f, 0.0f, SensorKind::kVoltage, true};
  EXPECT_NEAR(sensor_transfer(0.0, current), 1.65, 1e-6);
  EXPECT_NEAR(sensor_transfer(8.0, current), 2.97, 1e-6);
  EXPECT_NEAR(sensor_transfer(12.0, voltage), 3.0, 1e-6);
}

TEST(Quantize, RoundsAndClamps) {
  EXPECT_EQ(quantize(1.65, 3.3), 512);  // 511.5 rounds up
  EXPECT_EQ(quantize(0.0, 3.3), 0);
  EXPECT_EQ(quantize(-0.5, 3.3), 0);
  EXPECT_EQ(quantize(3.3, 3.3), 1023);
  EXPECT_EQ(quantize(5.0, 3.3), 1023);
}

TEST(Average, TiesToEven) {
  const std::array<std::uint16_t, 6> a{511, 512, 511, 512, 511, 512};  // 511.5
  EXPECT_EQ(average_subsamples(a), 512);
  const std::array<std::uint16_t, 6> b{510, 511, 510, 511, 510, 511};  // 510.5
  EXPECT_EQ(average_subsamples(b), 510);
  const std::array<std::uint16_t, 6> c{100, 100, 100, 100, 100, 101};  // 100.17
  EXPECT_EQ(average_subsamples(c), 100);
  const std::array<std::uint16_t, 6> d{1023, 1023, 1023, 1023, 1023, 1023};
  EXPECT_EQ(average_subsamples(d), 1023);
}

TEST(Boot, DefaultIsIdle) {
  VirtualDevice dev(quiet_device());
  EXPECT_FALSE(dev.streaming());
  EXPECT_EQ(dev.clock_micros(), 0u);
  EXPECT_TRUE(run(dev, 10).empty());
}

TEST(Boot, RejectsVoltageVoltagePair) {
  auto opts = quiet_device();
  opts.eeprom[2].kind = SensorKind::kVoltage;
  EXPECT_THROW(VirtualDevice{opts}, ConfigError);
}

TEST(Boot, RejectsBadScenario) {
  EXPECT_THROW(VirtualDevice{quiet_device(SquareWaveLoad{0, 1, 100, 1.5, 12})}, ConfigError);
  EXPECT_THROW(VirtualDevice{quiet_device(SquareWaveLoad{0, 1, 0, 0.5, 12})}, ConfigError);
  EXPECT_THROW(VirtualDevice{quiet_device(TraceLoad{{{1, 0, 0}, {1, 1, 1}}})}, ConfigError);
}

TEST(Tick, MillionTicksIsFiftySeconds) {
  VirtualDevice dev(quiet_device());
  command(dev, "S");
  std::vector<std::uint8_t> out;
  for (int i = 0; i < 1'000'000; ++i) {
    out.clear();
    dev.tick(out);
  }
  EXPECT_EQ(dev.clock_micros(), 50'000'000u);
}

TEST(Tick, ByteCountAndOrder) {
  auto opts = quiet_device();
  opts.eeprom[4].enabled = false;
  VirtualDevice dev(opts);
  command(dev, "S");
  std::vector<std::uint8_t> out;
  dev.tick(out);
  ASSERT_EQ(out.size(), 2u + 2u * 7u);
  DecoderState st;
  const auto ev = decode_stream(out, st);
  ASSERT_TRUE(std::holds_alternative<TimestampFrame>(ev[0]));
  int prev = -1;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const int idx = std::get<SampleFrame>(ev[i]).sensor_index;
    EXPECT_GT(idx, prev);
    EXPECT_NE(idx, 4);
    prev = idx;
  }
}

TEST(Tick, ZeroLoadLevels) {
  VirtualDevice dev(quiet_device(ConstantLoad{0.0, 12.0}));
  command(dev, "S");
  for (const auto& t : split_ticks(run(dev, 100))) {
    EXPECT_EQ(t.frames[0]->level, 512);
    EXPECT_EQ(t.frames[1]->level, 930);  // 12 x 0.25 / 3.3 x 1023 = 930
    EXPECT_EQ(t.frames[3]->level, 0);    // pair 1 has no load
  }
}

TEST(Tick, TimestampIsMidTickModulo1024) {
  VirtualDevice dev(quiet_device());
  command(dev, "S");
  const auto ticks = split_ticks(run(dev, 100));
  for (std::size_t i = 0; i < ticks.size(); ++i)
    EXPECT_EQ(ticks[i].micros, (i * 50 + 25) % 1024) << i;
}

TEST(Tick, DeterministicForSeed) {
  auto opts = quiet_device(SquareWaveLoad{1, 6, 100, 0.5, 12});
  opts.noise = NoiseModel{};
  opts.noise.seed = 99;
  VirtualDevice a(opts), b(opts);
  command(a, "S");
  command(b, "S");
  EXPECT_EQ(run(a, 5000), run(b, 5000));
  opts.noise.seed = 100;
  VirtualDevice c(opts);
  command(c, "S");
  command(a, "X");
  command(a, "S");
  EXPECT_NE(run(a, 5000), run(c, 5000));
}

TEST(Tick, RateCounters) {
  VirtualDevice dev(quiet_device());
  command(dev, "S");
  const auto bytes = run(dev, 20000);
  const auto c = dev.counters();
  EXPECT_EQ(c.ticks, 20000u);
  EXPECT_EQ(c.timestamp_frames, 20000u);
  EXPECT_EQ(c.sample_frames, 8u * 20000u);
  // One second of device time at 18 bytes per tick.
  EXPECT_EQ(bytes.size() * 8, 2'880'000u);
  EXPECT_EQ(dev.clock_micros(), 1'000'000u);
}

TEST(Commands, VersionAndConfig) {
  VirtualDevice dev(quiet_device());
  const auto v = command(dev, "V");
  EXPECT_EQ(std::string(v.begin(), v.end()), "PowerSensor3-sim 1.0\n");
  const auto r = command(dev, "R");
  EXPECT_EQ(r.size(), 224u);
  EXPECT_EQ(parse_config(r), default_config_block());
}

TEST(Commands, WriteThenRead) {
  VirtualDevice dev(quiet_device());
  auto block = default_config_block();
  block[0].vref = 3.0f;
  block[7].name = "renamed";
  const auto w = encode_write_config(block);
  std::vector<std::uint8_t> reply;
  // Deliver in awkward pieces; the device must reassemble.
  dev.handle_command(std::span(w).first(5), reply);
  dev.handle_command(std::span(w).subspan(5), reply);
  EXPECT_TRUE(reply.empty());
  EXPECT_EQ(command(dev, "R"), serialize_config(block));
}

TEST(Commands, InvalidWriteIsRejected) {
  VirtualDevice dev(quiet_device());
  auto wire = serialize_config(default_config_block());
  wire[24] = 5;
  std::vector<std::uint8_t> msg{'W'};
  msg.insert(msg.end(), wire.begin(), wire.end());
  std::vector<std::uint8_t> reply;
  dev.handle_command(msg, reply);
  EXPECT_EQ(dev.counters().rejected_writes, 1u);
  EXPECT_EQ(dev.eeprom(), default_config_block());
}

TEST(Commands, UnknownBytesCounted) {
  VirtualDevice dev(quiet_device());
  EXPECT_TRUE(command(dev, "qz\n").empty());
  EXPECT_EQ(dev.counters().unknown_commands, 3u);
}

TEST(Commands, StartStopRebootDfu) {
  VirtualDevice dev(quiet_device());
  command(dev, "S");
  run(dev, 10);
  EXPECT_EQ(dev.clock_micros(), 500u);
  command(dev, "T");
  EXPECT_TRUE(run(dev, 3).empty());
  command(dev, "X");
  EXPECT_EQ(dev.clock_micros(), 0u);
  EXPECT_FALSE(dev.streaming());
  const auto ack = command(dev, "Y");
  EXPECT_EQ(std::string(ack.begin(), ack.end()), "DFU\n");
  command(dev, "S");
  EXPECT_TRUE(dev.halted());
  EXPECT_TRUE(run(dev, 3).empty());
}

TEST(Markers, OnePerTickOnSensorZeroNoneLost) {
  VirtualDevice dev(quiet_device());
  command(dev, "S");
  command(dev, "MMM");
  const auto ticks = split_ticks(run(dev, 5));
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    EXPECT_EQ(ticks[i].frames[0]->marker, i < 3) << i;
    for (std::size_t s = 1; s < kMaxSensors; ++s) EXPECT_FALSE(ticks[i].frames[s]->marker);
  }
  EXPECT_EQ(dev.counters().markers, 3u);
}

TEST(Markers, WaitWhileSensorZeroDisabled) {
  auto opts = quiet_device();
  opts.eeprom[0].enabled = false;
  VirtualDevice dev(opts);
  command(dev, "SM");
  run(dev, 4);
  EXPECT_EQ(dev.counters().markers, 0u);
  auto block = dev.eeprom();
  block[0].enabled = true;
  std::vector<std::uint8_t> reply;
  dev.handle_command(encode_write_config(block), reply);
  const auto ticks = split_ticks(run(dev, 2));
  EXPECT_TRUE(ticks[0].frames[0]->marker);
  EXPECT_FALSE(ticks[1].frames[0]->marker);
}

TEST(Eeprom, PersistsAcrossBoots) {
  const auto path = std::filesystem::temp_directory_path() / "ps3_test_eeprom.bin";
  std::filesystem::remove(path);
  auto opts = quiet_device();
  opts.eeprom_file = path;
  {
    VirtualDevice dev(opts);
    EXPECT_EQ(std::filesystem::file_size(path), 224u);
    auto block = dev.eeprom();
    block[3].slope = 0.7f;
    std::vector<std::uint8_t> reply;
    dev.handle_command(encode_write_config(block), reply);
  }
  VirtualDevice again(opts);
  EXPECT_EQ(again.eeprom()[3].slope, 0.7f);
  std::filesystem::remove(path);
}

struct PowerStats {
  double mean = 0, sd = 0, above = 0, below = 0;  // excursions in sd units
};

PowerStats noisy_power(std::uint64_t seed, int n) {
  auto opts = quiet_device(ConstantLoad{4.0, 12.0});
  opts.noise = NoiseModel{0.115, 0.0, seed};
  for (std::size_t s = 2; s < kMaxSensors; ++s) opts.eeprom[s].enabled = false;
  VirtualDevice dev(opts);
  command(dev, "S");
  const auto cfg = dev.eeprom();
  std::vector<std::uint8_t> out;
  std::vector<double> p;
  p.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.clear();
    dev.tick(out);
    DecoderState st;
    const auto ev = decode_stream(out, st);
    const double amps = raw_to_physical(std::get<SampleFrame>(ev[1]).level, cfg[0]);
    const double volts = raw_to_physical(std::get<SampleFrame>(ev[2]).level, cfg[1]);
    p.push_back(amps * volts);
  }
  double sum = 0, sum2 = 0;
  for (double v : p) sum += v;
  PowerStats r;
  r.mean = sum / n;
  for (double v : p) sum2 += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(sum2 / n);
  r.above = (*std::max_element(p.begin(), p.end()) - r.mean) / r.sd;
  r.below = (r.mean - *std::min_element(p.begin(), p.end())) / r.sd;
  return r;
}

TEST(Noise, PowerStdFollowsSqrtSix) {
  const auto r = noisy_power(7, 131072);
  const double expected = 12.0 * 0.115 / std::sqrt(6.0);
  EXPECT_NEAR(r.sd, expected, 0.1 * expected);
}

// The largest of 128 k Gaussian draws is typically 4.3 sigma out but exceeds
// 4.5 sigma in roughly a third of runs, so the window is checked on the
// median excursion across seeds; single runs only get a loose sanity bound.
TEST(Noise, PeakExcursionsWithinWindow) {
  std::vector<double> excursions;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto r = noisy_power(seed, 131072);
    for (double e : {r.above, r.below}) {
      EXPECT_GE(e, 2.5);
      EXPECT_LE(e, 6.5);
      excursions.push_back(e);
    }
  }
  std::sort(excursions.begin(), excursions.end());
  const double median = (excursions[7] + excursions[8]) / 2;
  EXPECT_GE(median, 2.5);
  EXPECT_LE(median, 4.5);
}

TEST(Scenario, SquareWaveStartsLow) {
  const LoadScenario sq = SquareWaveLoad{1, 5, 100, 0.25, 12};
  EXPECT_EQ(evaluate(sq, 0.0).amps, 1);
  EXPECT_EQ(evaluate(sq, 0.0074).amps, 1);
  EXPECT_EQ(evaluate(sq, 0.0075).amps, 5);
  EXPECT_EQ(evaluate(sq, 0.0099).amps, 5);
  EXPECT_EQ(evaluate(sq, 0.0100).amps, 1);
  EXPECT_EQ(evaluate(sq, 0.0).volts, 12);
}

TEST(Scenario, TraceStepHold) {
  const LoadScenario tr = TraceLoad{{{0.5, 1, 10}, {1.0, 2, 11}}};
  EXPECT_EQ(evaluate(tr, 0.0).amps, 1);
  EXPECT_EQ(evaluate(tr, 0.75).amps, 1);
  EXPECT_EQ(evaluate(tr, 1.0).amps, 2);
  EXPECT_EQ(evaluate(tr, 9.0).volts, 11);
}

TEST(Scenario, Parse) {
  const auto c = std::get<ConstantLoad>(parse_scenario("constant 1 12"));
  EXPECT_EQ(c.amps, 1);
  EXPECT_EQ(c.volts, 12);
  const auto s = std::get<SquareWaveLoad>(parse_scenario("square 3.3 8 100 0.5 12"));
  EXPECT_EQ(s.high_amps, 8);
  const auto t = std::get<TraceLoad>(parse_scenario("trace 0:1:12,0.5:2:12"));
  EXPECT_EQ(t.points.size(), 2u);
  EXPECT_THROW(parse_scenario("sine 1 2"), ConfigError);
  EXPECT_THROW(parse_scenario("constant x 12"), ConfigError);
}

TEST(SimConfig, ParsesKeys) {
  const auto spec = parse_sim_config(
      "# comment\n"
      "clock = realtime\n"
      "seed = 5\n"
      "noise.current_rms = 0\n"
      "load = constant 1 12\n"
      "pair.2.load = square 0 2 100 0.5 12\n"
      "sensor.0.vref = 3.0\n"
      "sensor.3.enabled = 0\n"
      "hardware.0.offset = 0.02\n");
  EXPECT_EQ(spec.runner.mode, ClockMode::kRealtime);
  EXPECT_EQ(spec.device.noise.seed, 5u);
  EXPECT_EQ(spec.device.noise.current_rms, 0.0);
  EXPECT_TRUE(std::holds_alternative<ConstantLoad>(spec.device.loads[0]));
  EXPECT_TRUE(std::holds_alternative<SquareWaveLoad>(spec.device.loads[2]));
  EXPECT_EQ(spec.device.eeprom[0].vref, 3.0f);
  EXPECT_FALSE(spec.device.eeprom[3].enabled);
  ASSERT_TRUE(spec.device.hardware.has_value());
  EXPECT_EQ(spec.device.hardware->at(0).offset, 0.02f);
  EXPECT_THROW(parse_sim_config("bogus = 1\n"), ConfigError);
}

}  // namespace
}  // namespace ps3
