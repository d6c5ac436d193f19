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

#include "ps3/host.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

#include "ps3/dump.hpp"
#include "ps3/error.hpp"
#include "ps3/runner.hpp"
#include "ps3/sim_config.hpp"

namespace ps3 {

using namespace std::chrono_literals;
using SteadyClock = std::chrono::steady_clock;

double raw_to_physical(std::uint16_t level, const SensorConfig& cfg) {
  const double vref = cfg.vref;
  const double adc = level_to_adc_volts(level, vref);
  if (cfg.kind == SensorKind::kCurrent) return (adc - vref / 2.0 - cfg.offset) / cfg.slope;
  return (adc - cfg.offset) / cfg.slope;
}

double MeasurementState::total_watts() const {
  double w = 0.0;
  for (std::size_t p = 0; p < kMaxPairs; ++p)
    if (pair_enabled[p]) w += pairs[p].watts;
  return w;
}

namespace {

void check_order(const MeasurementState& a, const MeasurementState& b) {
  if (b.ticks < a.ticks) throw OrderingError("second state precedes the first");
}

}  // namespace

Energy energy(const MeasurementState& a, const MeasurementState& b) {
  check_order(a, b);
  return b.total_energy - a.total_energy;
}

double joules(const MeasurementState& a, const MeasurementState& b) {
  return energy(a, b).joules();
}

double seconds(const MeasurementState& a, const MeasurementState& b) {
  check_order(a, b);
  return static_cast<double>((b.device_time - a.device_time).count()) * 1e-6;
}

double watts(const MeasurementState& a, const MeasurementState& b) {
  const double s = seconds(a, b);
  if (s == 0.0) throw ZeroIntervalError("average power over zero seconds");
  return joules(a, b) / s;
}

double joules(const MeasurementState& a, const MeasurementState& b, std::size_t pair) {
  check_order(a, b);
  return (b.pair_energy.at(pair) - a.pair_energy.at(pair)).joules();
}

double watts(const MeasurementState& a, const MeasurementState& b, std::size_t pair) {
  const double s = seconds(a, b);
  if (s == 0.0) throw ZeroIntervalError("average power over zero seconds");
  return joules(a, b, pair) / s;
}

TransportPtr open_address(const std::string& address) {
  if (address.rfind("sim:", 0) == 0) {
    const auto path = address.substr(4);
    SimulatorSpec spec = path.empty() ? SimulatorSpec{} : load_sim_config(path);
    return EmbeddedSimulator::create(std::move(spec.device), spec.runner)->connect();
  }
  if (address.rfind("tcp:", 0) == 0) {
    const auto rest = address.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon + 1 == rest.size())
      throw TransportError("expected tcp:<host>:<port>, got " + address);
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      port = -1;
    }
    if (port <= 0 || port > 65535) throw TransportError("invalid port in " + address);
    return open_tcp(rest.substr(0, colon), static_cast<std::uint16_t>(port));
  }
  return open_serial(address);
}

namespace {

// Formats dump records on its own thread so the receiver never waits on I/O.
class DumpWriter {
 public:
  DumpWriter(std::unique_ptr<std::ostream> sink, const ConfigBlock& block)
      : sink_(std::move(sink)) {
    *sink_ << format_dump_header(block);
    if (!*sink_) failed_ = true;
    thread_ = std::thread([this] { run(); });
  }

  ~DumpWriter() {
    if (thread_.joinable()) finish();
  }

  void push(DumpRecord r) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(r));
    }
    cv_.notify_one();
  }

  /// Returns false if any write failed.
  bool finish() {
    {
      std::lock_guard lock(mu_);
      done_ = true;
    }
    cv_.notify_one();
    thread_.join();
    sink_->flush();
    if (!*sink_) failed_ = true;
    return !failed_;
  }

 private:
  void run() {
    std::deque<DumpRecord> batch;
    std::string text;
    for (;;) {
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !queue_.empty() || done_; });
        if (queue_.empty() && done_) return;
        batch.swap(queue_);
      }
      if (failed_) {
        batch.clear();
        continue;
      }
      text.clear();
      for (const auto& r : batch) text += format_dump_line(r);
      batch.clear();
      sink_->write(text.data(), static_cast<std::streamsize>(text.size()));
      sink_->flush();
      if (!*sink_) failed_ = true;
    }
  }

  std::unique_ptr<std::ostream> sink_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<DumpRecord> queue_;
  bool done_ = false;
  std::atomic<bool> failed_{false};
  std::thread thread_;
};

struct TickCapture {
  std::uint64_t target_ticks = 0;
  std::promise<MeasurementState> promise;
};

struct IntervalCapture {
  std::chrono::microseconds span{0};
  std::optional<MeasurementState> first;
  std::promise<std::pair<MeasurementState, MeasurementState>> promise;
};

struct ControlRequest {
  std::function<void()> fn;
  std::promise<void> done;
};

struct RawCaptureJob {
  std::uint64_t remaining = 0;
  std::array<std::uint64_t, kMaxSensors> n{};
  std::array<double, kMaxSensors> sum{};
  std::array<double, kMaxSensors> sum_sq{};
  std::promise<RawCapture> promise;
};

}  // namespace

class Session::Impl {
 public:
  Impl(TransportPtr link, ConnectOptions options) : link_(std::move(link)), options_(options) {
    handshake();
    receiver_ = std::thread([this] { receive_loop(); });
    std::unique_lock lock(state_mu_);
    if (!state_cv_.wait_for(lock, options_.deadline, [&] { return have_state_ || dead_; })) {
      lock.unlock();
      shutdown();
      throw TimeoutError("no sensor data within " + std::to_string(options_.deadline.count()) +
                         " ms");
    }
    if (!have_state_) {
      lock.unlock();
      shutdown();
      throw TransportError("link failed before the first sample: " + death_reason_);
    }
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    stop_ = true;
    if (receiver_.joinable()) receiver_.join();
    if (dump_) {
      dump_->finish();
      dump_.reset();
    }
    try {
      send(static_cast<std::uint8_t>(Command::kStopStream));
    } catch (const Error&) {
    }
    link_->close();
  }

  MeasurementState read_state() const {
    std::lock_guard lock(state_mu_);
    if (dead_) throw SessionDeadError("session is not receiving: " + death_reason_);
    return state_;
  }

  MeasurementState read_state(std::chrono::milliseconds max_age) const {
    auto s = read_state();
    if (SteadyClock::now() - s.host_time > max_age)
      throw TimeoutError("no new sample for more than " + std::to_string(max_age.count()) +
                         " ms");
    return s;
  }

  MeasurementState wait_for_ticks(std::uint64_t ticks, std::chrono::milliseconds timeout) {
    std::future<MeasurementState> fut;
    {
      std::lock_guard lock(state_mu_);
      if (dead_) throw SessionDeadError("session is not receiving: " + death_reason_);
      if (state_.ticks >= ticks) return state_;
      auto& c = tick_captures_.emplace_back();
      c.target_ticks = ticks;
      fut = c.promise.get_future();
    }
    return await(fut, timeout);
  }

  std::pair<MeasurementState, MeasurementState> measure_interval(
      std::chrono::microseconds span, std::chrono::milliseconds timeout) {
    std::future<std::pair<MeasurementState, MeasurementState>> fut;
    {
      std::lock_guard lock(state_mu_);
      if (dead_) throw SessionDeadError("session is not receiving: " + death_reason_);
      auto& c = interval_captures_.emplace_back();
      c.span = span;
      fut = c.promise.get_future();
    }
    return await(fut, timeout);
  }

  RawCapture capture_raw(std::uint64_t ticks, std::chrono::milliseconds timeout) {
    if (ticks == 0) throw Error("raw capture needs at least one tick");
    std::future<RawCapture> fut;
    {
      std::lock_guard lock(state_mu_);
      if (dead_) throw SessionDeadError("session is not receiving: " + death_reason_);
      auto& job = raw_jobs_.emplace_back();
      job.remaining = ticks;
      fut = job.promise.get_future();
    }
    return await(fut, timeout);
  }

  void mark(char c) {
    if (!std::isgraph(static_cast<unsigned char>(c)))
      throw Error("marker must be a printable, non-space character");
    {
      std::lock_guard lock(state_mu_);
      if (dead_) throw SessionDeadError("cannot mark: session is not receiving");
    }
    {
      std::lock_guard lock(marker_mu_);
      marker_queue_.push_back(c);
    }
    send(static_cast<std::uint8_t>(Command::kMarkNext));
  }

  std::vector<MarkerEvent> markers() const {
    std::lock_guard lock(marker_mu_);
    return marker_log_;
  }

  void start_dump(std::unique_ptr<std::ostream> sink, std::uint64_t max_records) {
    if (!sink || !*sink) throw Error("cannot open dump sink");
    auto cfg = get_config();
    auto writer = std::make_unique<DumpWriter>(std::move(sink), cfg);
    std::lock_guard lock(dump_mu_);
    if (dump_) throw Error("a dump is already active");
    dump_ = std::move(writer);
    dump_limit_ = max_records;
    dump_count_ = 0;
  }

  bool wait_dump(std::chrono::milliseconds timeout) const {
    std::unique_lock lock(dump_mu_);
    return dump_cv_.wait_for(lock, timeout, [&] {
      return !dump_ || (dump_limit_ != 0 && dump_count_ >= dump_limit_);
    });
  }

  void stop_dump() {
    std::unique_ptr<DumpWriter> writer;
    {
      std::lock_guard lock(dump_mu_);
      writer = std::move(dump_);
    }
    dump_cv_.notify_all();
    if (!writer) return;
    if (!writer->finish()) throw Error("dump sink write failed");
  }

  bool dumping() const {
    std::lock_guard lock(dump_mu_);
    return dump_ != nullptr;
  }

  ConfigBlock get_config() const {
    std::lock_guard lock(config_mu_);
    return config_;
  }

  void set_config(const ConfigBlock& block) {
    validate_block(block);
    run_control([&] {
      pause();
      std::vector<std::uint8_t> msg = encode_write_config(block);
      send(msg);
      send(static_cast<std::uint8_t>(Command::kReadConfig));
      const auto echo = read_exact(kConfigBlockSize);
      const bool ok = echo == serialize_config(block);
      if (ok) {
        std::lock_guard lock(config_mu_);
        config_ = parse_config(echo);
      }
      resume();
      if (!ok) throw ConfigError("config verification failed: device returned a different block");
    });
  }

  std::string version() {
    std::string v;
    run_control([&] {
      pause();
      send(static_cast<std::uint8_t>(Command::kGetVersion));
      v = read_line();
      resume();
    });
    return v;
  }

  void stop_stream() {
    run_control([&] {
      pause();
      mark_dead("stream stopped");
    });
  }

  void reboot(bool to_dfu) {
    run_control([&] {
      pause();
      send(static_cast<std::uint8_t>(to_dfu ? Command::kRebootToDfu : Command::kReboot));
      mark_dead(to_dfu ? "device rebooted to DFU" : "device rebooted");
    });
  }

  bool alive() const {
    std::lock_guard lock(state_mu_);
    return !dead_;
  }

 private:
  template <class T>
  T await(std::future<T>& fut, std::chrono::milliseconds timeout) {
    if (fut.wait_for(timeout) != std::future_status::ready)
      throw TimeoutError("timed out waiting for device data");
    return fut.get();
  }

  // --- link helpers (receiver thread or before it starts) -----------------

  void send(std::uint8_t byte) { send(std::span(&byte, 1)); }
  void send(std::span<const std::uint8_t> bytes) {
    std::lock_guard lock(write_mu_);
    link_->write(bytes);
  }

  std::vector<std::uint8_t> read_exact(std::size_t n) {
    std::vector<std::uint8_t> out;
    out.reserve(n);
    std::array<std::uint8_t, 256> buf;
    const auto deadline = SteadyClock::now() + options_.deadline;
    while (out.size() < n) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - SteadyClock::now());
      if (left <= 0ms) throw TimeoutError("device did not reply within " +
                                          std::to_string(options_.deadline.count()) + " ms");
      const auto got = link_->read(std::span(buf.data(), std::min(buf.size(), n - out.size())), left);
      out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(got));
    }
    return out;
  }

  std::string read_line() {
    std::string line;
    const auto deadline = SteadyClock::now() + options_.deadline;
    std::uint8_t c = 0;
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - SteadyClock::now());
      if (left <= 0ms) throw TimeoutError("device did not reply");
      if (link_->read(std::span(&c, 1), left) == 0) continue;
      if (c == '\n') return line;
      line.push_back(static_cast<char>(c));
    }
  }

  // Reads until the link has been quiet for the idle window. Bytes are fed
  // to the stream processor unless `discard` is set.
  void drain(bool discard) {
    std::array<std::uint8_t, 4096> buf;
    const auto deadline = SteadyClock::now() + options_.deadline;
    for (;;) {
      const auto n = link_->read(buf, options_.idle_window);
      if (n == 0) return;
      if (!discard) process(std::span(buf.data(), n));
      if (SteadyClock::now() > deadline)
        throw TimeoutError("device kept streaming after a stop request");
    }
  }

  void pause() {
    send(static_cast<std::uint8_t>(Command::kStopStream));
    drain(false);
  }

  void resume() { send(static_cast<std::uint8_t>(Command::kStartStream)); }

  void handshake() {
    send(static_cast<std::uint8_t>(Command::kStopStream));
    drain(true);
    send(static_cast<std::uint8_t>(Command::kReadConfig));
    auto block = parse_config(read_exact(kConfigBlockSize));
    validate_block(block);
    config_ = block;
    resume();
  }

  void run_control(std::function<void()> fn) {
    std::future<void> fut;
    {
      std::lock_guard lock(state_mu_);
      if (dead_) throw SessionDeadError("session is not receiving: " + death_reason_);
      auto& req = controls_.emplace_back();
      req.fn = std::move(fn);
      fut = req.done.get_future();
    }
    fut.get();
  }

  // --- receiver ----------------------------------------------------------

  void receive_loop() {
    std::array<std::uint8_t, 8192> buf;
    try {
      while (!stop_) {
        run_pending_controls();
        if (is_dead()) break;
        const auto n = link_->read(buf, 10ms);
        if (n) process(std::span(buf.data(), n));
      }
    } catch (const std::exception& e) {
      mark_dead(e.what());
    }
    mark_dead("session closed");
  }

  bool is_dead() const {
    std::lock_guard lock(state_mu_);
    return dead_;
  }

  void run_pending_controls() {
    for (;;) {
      ControlRequest req;
      {
        std::lock_guard lock(state_mu_);
        if (controls_.empty() || dead_) return;
        req = std::move(controls_.front());
        controls_.pop_front();
      }
      try {
        req.fn();
        req.done.set_value();
      } catch (const ConfigError&) {
        req.done.set_exception(std::current_exception());
      } catch (const std::exception& e) {
        // The link is in an unknown state after a failed exchange.
        req.done.set_exception(std::current_exception());
        mark_dead(e.what());
      }
    }
  }

  void mark_dead(const std::string& why) {
    std::lock_guard lock(state_mu_);
    if (dead_) return;
    dead_ = true;
    death_reason_ = why;
    const auto err = std::make_exception_ptr(SessionDeadError("session died: " + why));
    for (auto& c : tick_captures_) c.promise.set_exception(err);
    for (auto& c : interval_captures_) c.promise.set_exception(err);
    for (auto& j : raw_jobs_) j.promise.set_exception(err);
    tick_captures_.clear();
    interval_captures_.clear();
    raw_jobs_.clear();
    for (auto& c : controls_) c.done.set_exception(err);
    controls_.clear();
    state_cv_.notify_all();
  }

  void process(std::span<const std::uint8_t> bytes) {
    events_.clear();
    decode_stream(bytes, decoder_, events_);
    for (const auto& ev : events_) {
      if (const auto* ts = std::get_if<TimestampFrame>(&ev)) {
        if (tick_open_) commit_tick();
        open_tick(ts->micros);
        continue;
      }
      const auto& s = std::get<SampleFrame>(ev);
      if (!tick_open_) {
        orphan_bytes_ += 2;
        continue;
      }
      levels_[s.sensor_index] = s.level;
      received_ |= 1u << s.sensor_index;
      ++samples_;
      if (s.marker) tick_marker_ = true;
      if ((received_ & expected_mask()) == expected_mask()) commit_tick();
    }
  }

  unsigned expected_mask() const {
    unsigned mask = 0;
    for (std::size_t i = 0; i < kMaxSensors; ++i)
      if (config_[i].enabled) mask |= 1u << i;
    return mask;
  }

  void open_tick(std::uint16_t raw) {
    ++timestamps_;
    if (!have_clock_) {
      device_us_ = raw;
      have_clock_ = true;
    } else {
      // 10-bit microsecond counter; ticks are 50 us apart.
      device_us_ += (raw - last_raw_ + 1024) % 1024;
    }
    last_raw_ = raw;
    tick_open_ = true;
    received_ = 0;
    tick_marker_ = false;
  }

  void commit_tick() {
    tick_open_ = false;
    if ((received_ & expected_mask()) != expected_mask()) {
      ++incomplete_ticks_;
      return;
    }

    const std::chrono::microseconds now_us{device_us_};
    const std::int64_t dt_us = have_prev_tick_ ? (now_us - prev_tick_us_).count() : 0;
    prev_tick_us_ = now_us;
    have_prev_tick_ = true;

    MeasurementState next;
    {
      std::lock_guard lock(state_mu_);
      next = state_;
    }
    Energy total = next.total_energy;
    for (std::size_t p = 0; p < kMaxPairs; ++p) {
      next.pair_enabled[p] = pair_enabled(config_, p);
      if (!next.pair_enabled[p]) {
        next.pairs[p] = PairReading{};
        continue;
      }
      PairReading r;
      r.amps = raw_to_physical(levels_[2 * p], config_[2 * p]);
      r.volts = raw_to_physical(levels_[2 * p + 1], config_[2 * p + 1]);
      r.watts = r.volts * r.amps;
      r.device_time = now_us;
      next.pairs[p] = r;
      // W x us = uJ, stored in nJ. The rounding remainder is carried into the
      // next tick so it cannot accumulate.
      const double exact = r.watts * static_cast<double>(dt_us) * 1e3 + energy_carry_[p];
      const auto nj = std::llround(exact);
      energy_carry_[p] = exact - static_cast<double>(nj);
      const auto inc = Energy::from_nanojoules(nj);
      next.pair_energy[p] += inc;
      total += inc;
    }
    next.total_energy = total;
    next.device_time = now_us;
    next.host_time = SteadyClock::now();
    next.ticks += 1;
    next.samples = samples_;
    next.timestamps = timestamps_;
    next.dropped_bytes = decoder_.discarded + orphan_bytes_;

    std::optional<char> marker;
    if (tick_marker_) {
      std::lock_guard lock(marker_mu_);
      char c = '?';
      if (!marker_queue_.empty()) {
        c = marker_queue_.front();
        marker_queue_.pop_front();
      }
      marker = c;
      marker_log_.push_back({c, now_us, next.ticks});
    }

    {
      std::lock_guard lock(dump_mu_);
      if (dump_ && (dump_limit_ == 0 || dump_count_ < dump_limit_)) {
        DumpRecord rec;
        rec.device_time = now_us;
        rec.pairs = next.pairs;
        rec.pair_enabled = next.pair_enabled;
        rec.total_watts = next.total_watts();
        rec.marker = marker;
        dump_->push(std::move(rec));
        if (++dump_count_ == dump_limit_) dump_cv_.notify_all();
      }
    }

    std::lock_guard lock(state_mu_);
    state_ = next;
    have_state_ = true;
    fulfil_captures();
    state_cv_.notify_all();
  }

  // Called with state_mu_ held.
  void fulfil_captures() {
    std::erase_if(tick_captures_, [&](TickCapture& c) {
      if (state_.ticks < c.target_ticks) return false;
      c.promise.set_value(state_);
      return true;
    });
    std::erase_if(interval_captures_, [&](IntervalCapture& c) {
      if (!c.first) {
        c.first = state_;
        return false;
      }
      if (state_.device_time - c.first->device_time < c.span) return false;
      c.promise.set_value({*c.first, state_});
      return true;
    });
    std::erase_if(raw_jobs_, [&](RawCaptureJob& j) {
      for (std::size_t i = 0; i < kMaxSensors; ++i) {
        if (!config_[i].enabled) continue;
        const double l = levels_[i];
        ++j.n[i];
        j.sum[i] += l;
        j.sum_sq[i] += l * l;
      }
      if (--j.remaining > 0) return false;
      RawCapture out;
      for (std::size_t i = 0; i < kMaxSensors; ++i) {
        out.count[i] = j.n[i];
        if (j.n[i] == 0) continue;
        const double n = static_cast<double>(j.n[i]);
        const double mean = j.sum[i] / n;
        out.mean_level[i] = mean;
        out.std_level[i] = std::sqrt(std::max(0.0, j.sum_sq[i] / n - mean * mean));
      }
      j.promise.set_value(out);
      return true;
    });
  }

  TransportPtr link_;
  ConnectOptions options_;
  std::mutex write_mu_;

  // Receiver-thread state.
  DecoderState decoder_;
  std::vector<StreamEvent> events_;
  std::array<std::uint16_t, kMaxSensors> levels_{};
  unsigned received_ = 0;
  bool tick_open_ = false;
  bool tick_marker_ = false;
  bool have_clock_ = false;
  std::uint16_t last_raw_ = 0;
  std::int64_t device_us_ = 0;
  bool have_prev_tick_ = false;
  std::array<double, kMaxPairs> energy_carry_{};
  std::chrono::microseconds prev_tick_us_{0};
  std::uint64_t samples_ = 0;
  std::uint64_t timestamps_ = 0;
  std::uint64_t orphan_bytes_ = 0;
  std::uint64_t incomplete_ticks_ = 0;

  // Written only by the receiver (or before it starts); read under config_mu_.
  mutable std::mutex config_mu_;
  ConfigBlock config_;

  mutable std::mutex state_mu_;
  std::condition_variable state_cv_;
  MeasurementState state_;
  bool have_state_ = false;
  bool dead_ = false;
  std::string death_reason_;
  std::vector<TickCapture> tick_captures_;
  std::vector<IntervalCapture> interval_captures_;
  std::vector<RawCaptureJob> raw_jobs_;
  std::deque<ControlRequest> controls_;

  mutable std::mutex marker_mu_;
  std::deque<char> marker_queue_;
  std::vector<MarkerEvent> marker_log_;

  mutable std::mutex dump_mu_;
  std::unique_ptr<DumpWriter> dump_;
  mutable std::condition_variable dump_cv_;
  std::uint64_t dump_limit_ = 0;
  std::uint64_t dump_count_ = 0;

  std::atomic<bool> stop_{false};
  std::thread receiver_;
};

Session::Session(TransportPtr link, ConnectOptions options)
    : impl_(std::make_unique<Impl>(std::move(link), options)) {}

Session Session::connect(const std::string& address, ConnectOptions options) {
  return Session(open_address(address), options);
}

Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;
Session::~Session() = default;

MeasurementState Session::read_state() const { return impl_->read_state(); }
MeasurementState Session::read_state(std::chrono::milliseconds max_age) const {
  return impl_->read_state(max_age);
}
MeasurementState Session::wait_for_ticks(std::uint64_t ticks,
                                         std::chrono::milliseconds timeout) const {
  return impl_->wait_for_ticks(ticks, timeout);
}
std::pair<MeasurementState, MeasurementState> Session::measure_interval(
    std::chrono::microseconds span, std::chrono::milliseconds timeout) const {
  return impl_->measure_interval(span, timeout);
}
void Session::mark(char c) { impl_->mark(c); }
std::vector<MarkerEvent> Session::markers() const { return impl_->markers(); }

void Session::start_dump(const std::filesystem::path& path, std::uint64_t max_records) {
  auto file = std::make_unique<std::ofstream>(path, std::ios::trunc);
  if (!*file) throw Error("cannot open dump file " + path.string());
  impl_->start_dump(std::move(file), max_records);
}
void Session::start_dump(std::unique_ptr<std::ostream> sink, std::uint64_t max_records) {
  impl_->start_dump(std::move(sink), max_records);
}
bool Session::wait_dump(std::chrono::milliseconds timeout) const {
  return impl_->wait_dump(timeout);
}
void Session::stop_dump() { impl_->stop_dump(); }
bool Session::dumping() const { return impl_->dumping(); }
ConfigBlock Session::get_config() const { return impl_->get_config(); }
void Session::set_config(const ConfigBlock& block) { impl_->set_config(block); }
RawCapture Session::capture_raw(std::uint64_t ticks, std::chrono::milliseconds timeout) {
  return impl_->capture_raw(ticks, timeout);
}
std::string Session::version() { return impl_->version(); }
void Session::stop_stream() { impl_->stop_stream(); }
void Session::reboot(bool to_dfu) { impl_->reboot(to_dfu); }
bool Session::alive() const { return impl_->alive(); }

}  // namespace ps3
