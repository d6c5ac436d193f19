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

#include <cmath>
#include <sstream>
#include <thread>

#include "ps3/dump.hpp"
#include "ps3/error.hpp"
#include "ps3/host.hpp"
#include "ps3/runner.hpp"
#include "sim_support.hpp"

namespace ps3 {
namespace {

using namespace std::chrono_literals;
using testing::ideal_level;
using testing::open_sim;
using testing::quiet_device;

const SensorConfig kCurrent{"i", 3.3f, 0.165f, 0.0f, SensorKind::kCurrent, true};
const SensorConfig kVoltage{"u", 3.3f, 0.25f, 0.0f, SensorKind::kVoltage, true};

// Half an LSB referred to the physical side of a sensor.
double half_lsb(const SensorConfig& cfg) { return 0.5 * cfg.vref / 1023.0 / cfg.slope; }

// Stream that keeps its buffer alive for inspection after the session
// destroys the stream.
class SharedStream : public std::ostream {
 public:
  explicit SharedStream(std::shared_ptr<std::streambuf> buf)
      : std::ostream(buf.get()), buf_(std::move(buf)) {}

 private:
  std::shared_ptr<std::streambuf> buf_;
};

TEST(RawToPhysical, Examples) {
  const double vref = 3.3f;  // the stored single-precision value
  EXPECT_NEAR(raw_to_physical(512, kCurrent), (512.0 / 1023.0 * vref - vref / 2) / 0.165, 1e-9);
  EXPECT_NEAR(raw_to_physical(512, kCurrent), 0.00977, 1e-5);
  EXPECT_EQ(raw_to_physical(0, kVoltage), 0.0);
  EXPECT_NEAR(raw_to_physical(1023, kVoltage), 13.2, 1e-5);
}

TEST(RawToPhysical, InvertsTransferWithinHalfLsb) {
  for (double amps = -9.9; amps <= 9.9; amps += 0.0137) {
    const double back = raw_to_physical(ideal_level(amps, kCurrent), kCurrent);
    ASSERT_NEAR(back, amps, half_lsb(kCurrent) * 1.0001) << amps;
  }
  for (double volts = 0; volts <= 13.1; volts += 0.0071) {
    const double back = raw_to_physical(ideal_level(volts, kVoltage), kVoltage);
    ASSERT_NEAR(back, volts, half_lsb(kVoltage) * 1.0001) << volts;
  }
}

TEST(Connect, SessionHasBootConfig) {
  auto s = open_sim(quiet_device());
  EXPECT_EQ(s.session.get_config(), default_config_block());
  EXPECT_TRUE(s.session.alive());
  EXPECT_GE(s.session.read_state().ticks, 1u);
}

TEST(Connect, SilentEndpointTimesOut) {
  auto [host, device] = make_channel_pair();
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(Session{std::move(host)}, TimeoutError);
  const auto elapsed = std::chrono::steady_clock::now() - t0;
  EXPECT_GE(elapsed, 900ms);
  EXPECT_LT(elapsed, 3s);
}

TEST(Connect, DeadTcpPortIsTransportError) {
  std::uint16_t port = 0;
  {
    TcpServer probe(0);
    port = probe.port();
  }
  EXPECT_THROW(Session::connect("tcp:127.0.0.1:" + std::to_string(port)), TransportError);
}

TEST(Connect, BadAddresses) {
  EXPECT_THROW(Session::connect("tcp:localhost"), TransportError);
  EXPECT_THROW(Session::connect("/nonexistent/ttyACM9"), TransportError);
}

TEST(Connect, OverPseudoTerminal) {
  VirtualDevice device(quiet_device(ConstantLoad{1.0, 12.0}));
  auto pty = open_pty();
  RunnerOptions ro;
  ro.stop_on_close = false;
  DeviceRunner runner(device, *pty.master, ro);
  runner.start();
  {
    auto session = Session::connect(pty.slave_path);
    EXPECT_EQ(session.get_config().size(), 8u);
    const auto st = session.wait_for_ticks(session.read_state().ticks + 100, 5s);
    EXPECT_NEAR(st.total_watts(), 12.0, 0.2);
  }
  // A second host can attach after the first leaves.
  auto again = Session::connect(pty.slave_path);
  EXPECT_EQ(again.version(), "PowerSensor3-sim 1.0");
  runner.stop();
}

TEST(Connect, OverTcp) {
  VirtualDevice device(quiet_device(ConstantLoad{1.0, 12.0}));
  auto server = std::make_unique<TcpServer>(0);
  const auto address = "tcp:127.0.0.1:" + std::to_string(server->port());
  RunnerOptions ro;
  ro.stop_on_close = false;
  DeviceRunner runner(device, *server, ro);
  runner.start();
  for (int round = 0; round < 2; ++round) {
    auto session = Session::connect(address);
    const auto st = session.wait_for_ticks(session.read_state().ticks + 100, 5s);
    EXPECT_NEAR(st.total_watts(), 12.0, 0.2);
  }
  runner.stop();
}

TEST(Interval, ConstantLoadMatchesQuantizedOracle) {
  auto s = open_sim(quiet_device(ConstantLoad{1.0, 12.0}));
  const auto cfg = default_config_block();
  const double p = raw_to_physical(ideal_level(1.0, cfg[0]), cfg[0]) *
                   raw_to_physical(ideal_level(12.0, cfg[1]), cfg[1]);
  const auto [a, b] = s.session.measure_interval(2s, 30s);
  EXPECT_DOUBLE_EQ(seconds(a, b), 2.0);
  EXPECT_NEAR(joules(a, b), p * 2.0, 50e-6 * p);
  EXPECT_NEAR(watts(a, b), p, 1e-6);
  EXPECT_NEAR(watts(a, b), 12.0, 0.12);  // half an LSB of current at 12 V
}

TEST(Interval, SquareWaveWholePeriods) {
  auto s = open_sim(quiet_device(SquareWaveLoad{0.0, 2.0, 100.0, 0.5, 12.0}));
  const auto cfg = default_config_block();
  const double u = raw_to_physical(ideal_level(12.0, cfg[1]), cfg[1]);
  const double lo = raw_to_physical(ideal_level(0.0, cfg[0]), cfg[0]) * u;
  const double hi = raw_to_physical(ideal_level(2.0, cfg[0]), cfg[0]) * u;
  const auto [a, b] = s.session.measure_interval(2s, 30s);
  ASSERT_DOUBLE_EQ(seconds(a, b), 2.0);
  EXPECT_NEAR(joules(a, b), (lo + hi) * 1.0, 2 * 50e-6 * hi);
  EXPECT_NEAR(joules(a, b), 24.0, 0.5);
}

TEST(Interval, OrderingAndZeroInterval) {
  auto s = open_sim(quiet_device(ConstantLoad{1.0, 12.0}));
  const auto a = s.session.read_state();
  const auto b = s.session.wait_for_ticks(a.ticks + 10, 5s);
  EXPECT_THROW(joules(b, a), OrderingError);
  EXPECT_EQ(joules(a, a), 0.0);
  EXPECT_EQ(seconds(a, a), 0.0);
  EXPECT_THROW(watts(a, a), ZeroIntervalError);
  EXPECT_DOUBLE_EQ(watts(a, b) * seconds(a, b), joules(a, b));
}

TEST(Interval, EnergyAdditivityIsExact) {
  auto dev = quiet_device(SquareWaveLoad{0.5, 7.0, 333.0, 0.3, 12.0});
  dev.noise = NoiseModel{};
  auto s = open_sim(dev);
  std::vector<MeasurementState> chain{s.session.read_state()};
  for (int i = 1; i < 50; ++i)
    chain.push_back(s.session.wait_for_ticks(chain.back().ticks + 1 + i * 37 % 200, 5s));
  Energy sum;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) sum += energy(chain[i], chain[i + 1]);
  EXPECT_EQ(sum, energy(chain.front(), chain.back()));
  for (const auto& st : chain) {
    Energy pairs;
    for (auto e : st.pair_energy) pairs += e;
    EXPECT_EQ(pairs, st.total_energy);
  }
}

TEST(Stream, TimeUnwrapsExactlyOver2To20Ticks) {
  auto s = open_sim(quiet_device());
  const auto a = s.session.read_state();
  const auto b = s.session.wait_for_ticks(a.ticks + (1u << 20), 120s);
  EXPECT_EQ((b.device_time - a.device_time).count(),
            static_cast<std::int64_t>((b.ticks - a.ticks) * 50));
}

TEST(Stream, NoSampleLossAndConsistentSnapshots) {
  auto dev = quiet_device(SquareWaveLoad{1, 5, 1000, 0.5, 12});
  dev.loads[3] = ConstantLoad{2, 20};
  auto s = open_sim(dev);
  const auto a = s.session.read_state();
  const auto b = s.session.wait_for_ticks(a.ticks + 100000, 60s);
  EXPECT_EQ(b.samples - a.samples, 8 * (b.ticks - a.ticks));
  EXPECT_EQ(b.timestamps - a.timestamps, b.ticks - a.ticks);
  EXPECT_EQ(b.dropped_bytes, 0u);
  for (const auto& p : b.pairs) EXPECT_EQ(p.device_time, b.device_time);
  EXPECT_NEAR(b.pairs[3].watts, 40.0, 0.5);
}

TEST(State, RepeatedReadsWithoutTicksAreIdentical) {
  auto s = open_sim(quiet_device(ConstantLoad{1, 12}), /*gated=*/true, 5);
  const auto a = s.session.wait_for_ticks(5, 5s);
  const auto b = s.session.read_state();
  EXPECT_EQ(a.ticks, b.ticks);
  EXPECT_EQ(a.total_energy, b.total_energy);
  EXPECT_EQ(a.host_time, b.host_time);
}

TEST(State, StalenessIsTransientDeathIsNot) {
  auto s = open_sim(quiet_device(), /*gated=*/true, 1);
  std::this_thread::sleep_for(120ms);
  EXPECT_THROW(s.session.read_state(50ms), TimeoutError);
  EXPECT_NO_THROW(s.session.read_state());
  s.sim->grant(10);
  const auto st = s.session.wait_for_ticks(11, 5s);
  EXPECT_NO_THROW(s.session.read_state(1000ms));
  s.session.stop_stream();
  EXPECT_FALSE(s.session.alive());
  EXPECT_THROW(s.session.read_state(), SessionDeadError);
  EXPECT_THROW(s.session.mark('A'), SessionDeadError);
  (void)st;
}

TEST(State, RebootEndsSession) {
  auto s = open_sim(quiet_device());
  s.session.reboot();
  EXPECT_THROW(s.session.read_state(), SessionDeadError);
  EXPECT_EQ(s.sim->device().clock_micros(), 0u);
}

TEST(Config, SetThenGetAndImmediateUse) {
  auto s = open_sim(quiet_device(ConstantLoad{1, 12}));
  auto block = s.session.get_config();
  block[0].vref = 3.0f;
  block[1].slope = 0.125f;  // stored gain half the true one: volts read double
  s.session.set_config(block);
  EXPECT_EQ(s.session.get_config()[0].vref, 3.0f);
  EXPECT_EQ(s.sim->device().eeprom(), block);
  const auto st = s.session.wait_for_ticks(s.session.read_state().ticks + 2, 5s);
  EXPECT_NEAR(st.pairs[0].volts, 24.0, 0.05);
}

TEST(Config, InvalidBlockRejectedBeforeTransmission) {
  auto s = open_sim(quiet_device());
  auto block = s.session.get_config();
  block[2].kind = SensorKind::kVoltage;
  EXPECT_THROW(s.session.set_config(block), ConfigError);
  block = s.session.get_config();
  block[0].name = "much-too-long-name";
  EXPECT_THROW(s.session.set_config(block), ConfigError);
  EXPECT_EQ(s.sim->device().counters().rejected_writes, 0u);
  EXPECT_EQ(s.sim->device().eeprom(), default_config_block());
  EXPECT_TRUE(s.session.alive());
}

TEST(Config, VersionKeepsStreaming) {
  auto s = open_sim(quiet_device());
  EXPECT_EQ(s.session.version(), "PowerSensor3-sim 1.0");
  const auto before = s.session.read_state().ticks;
  EXPECT_GT(s.session.wait_for_ticks(before + 100, 5s).ticks, before);
}

TEST(Markers, OrderPreservedInStateAndDump) {
  auto s = open_sim(quiet_device(ConstantLoad{1, 12}));
  auto text = std::make_shared<std::stringbuf>();
  s.session.start_dump(std::make_unique<SharedStream>(text));
  s.session.mark('A');
  s.session.wait_for_ticks(s.session.read_state().ticks + 200, 5s);
  s.session.mark('B');
  s.session.wait_for_ticks(s.session.read_state().ticks + 200, 5s);
  s.session.stop_dump();
  const auto m = s.session.markers();
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].character, 'A');
  EXPECT_EQ(m[1].character, 'B');
  EXPECT_LT(m[0].tick, m[1].tick);
  const auto dump = text->str();
  const auto pa = dump.find(" MA\n");
  const auto pb = dump.find(" MB\n");
  ASSERT_NE(pa, std::string::npos);
  ASSERT_NE(pb, std::string::npos);
  EXPECT_LT(pa, pb);
  EXPECT_THROW(s.session.mark(' '), Error);
}

TEST(Dump, OneLinePerTickWithinHalfLsb) {
  auto s = open_sim(quiet_device(ConstantLoad{1, 12}));
  auto text = std::make_shared<std::stringbuf>();
  s.session.start_dump(std::make_unique<SharedStream>(text), 20000);
  ASSERT_TRUE(s.session.wait_dump(30s));
  s.session.stop_dump();
  const auto cfg = default_config_block();
  const double ei = half_lsb(cfg[0]), eu = half_lsb(cfg[1]);
  const double bound = 12 * ei + 1 * eu + ei * eu;
  std::istringstream in(text->str());
  std::size_t lines = 0, header = 0;
  double prev_t = -1;
  for (std::string line; std::getline(in, line);) {
    if (line[0] == '#') {
      ++header;
      continue;
    }
    ++lines;
    std::istringstream f(line);
    std::string tag;
    double t = 0, v[12], total = 0;
    f >> tag >> t;
    for (double& x : v) f >> x;
    f >> total;
    ASSERT_EQ(tag, "S");
    if (lines > 1) ASSERT_NEAR(t - prev_t, 50e-6, 1e-9) << line;
    prev_t = t;
    ASSERT_NEAR(total, 12.0, bound) << line;
  }
  EXPECT_EQ(lines, 20000u);
  EXPECT_EQ(header, 10u);
}

TEST(Dump, HeaderAndDisabledPairFormat) {
  auto block = default_config_block();
  block[5].enabled = false;
  DumpRecord r;
  r.device_time = 1234567us;
  r.pair_enabled = {true, true, false, true};
  r.pairs[0] = {12.0, 1.0, 12.0, r.device_time};
  r.total_watts = 12.0;
  r.marker = 'Q';
  EXPECT_EQ(format_dump_line(r),
            "S 1.234567 12.0000 1.0000 12.0000 0.0000 0.0000 0.0000 - - - 0.0000 0.0000 0.0000 "
            "12.0000 MQ\n");
  const auto header = format_dump_header(block);
  EXPECT_NE(header.find("# sensor 5 name=ext12V-U kind=voltage"), std::string::npos);
  EXPECT_NE(header.find("enabled=0"), std::string::npos);
}

// Accepts `limit` bytes, then reports failure.
class FailingBuf : public std::streambuf {
 public:
  explicit FailingBuf(std::size_t limit) : limit_(limit) {}

 protected:
  int_type overflow(int_type c) override {
    if (written_ >= limit_) return traits_type::eof();
    ++written_;
    return c;
  }
  std::streamsize xsputn(const char*, std::streamsize n) override {
    if (written_ + static_cast<std::size_t>(n) > limit_) return 0;
    written_ += static_cast<std::size_t>(n);
    return n;
  }

 private:
  std::size_t limit_;
  std::size_t written_ = 0;
};

TEST(Dump, SinkFailureSurfacesOnStop) {
  auto s = open_sim(quiet_device());
  s.session.start_dump(std::make_unique<SharedStream>(std::make_shared<FailingBuf>(4096)));
  s.session.wait_for_ticks(s.session.read_state().ticks + 2000, 5s);
  EXPECT_THROW(s.session.stop_dump(), Error);
  EXPECT_FALSE(s.session.dumping());
  EXPECT_TRUE(s.session.alive());
}

TEST(Dump, DisabledPairExcludedFromTotal) {
  auto dev = quiet_device(ConstantLoad{1, 12});
  dev.loads[1] = ConstantLoad{1, 3.3};
  dev.eeprom[3].enabled = false;
  auto s = open_sim(dev);
  const auto st = s.session.wait_for_ticks(s.session.read_state().ticks + 2, 5s);
  EXPECT_FALSE(st.pair_enabled[1]);
  EXPECT_NEAR(st.total_watts(), 12.0, 0.15);
}

}  // namespace
}  // namespace ps3
