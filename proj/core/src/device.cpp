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

#include "ps3/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

ConfigBlock read_eeprom_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read EEPROM image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_config(bytes);
  } catch (const ProtocolError& e) {
    throw ConfigError("EEPROM image " + path.string() + ": " + e.what());
  }
}

void write_eeprom_image(const std::filesystem::path& path, const ConfigBlock& block) {
  const auto bytes = serialize_config(block);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("cannot write EEPROM image " + path.string());
}

}  // namespace

double sensor_transfer(double physical, const SensorConfig& cfg) {
  if (cfg.kind == SensorKind::kCurrent)
    return cfg.vref / 2.0 + physical * cfg.slope + cfg.offset;
  return physical * cfg.slope + cfg.offset;
}

std::uint16_t quantize(double adc_volts, double vref) {
  const double x = std::floor(adc_volts / vref * kMaxLevel + 0.5);
  return static_cast<std::uint16_t>(std::clamp(x, 0.0, static_cast<double>(kMaxLevel)));
}

std::uint16_t average_subsamples(std::span<const std::uint16_t, kSubSamples> levels) {
  unsigned sum = 0;
  for (auto l : levels) sum += l;
  unsigned q = sum / kSubSamples;
  const unsigned r = sum % kSubSamples;
  if (r * 2 > kSubSamples || (r * 2 == kSubSamples && (q & 1u))) ++q;
  return static_cast<std::uint16_t>(q);
}

VirtualDevice::VirtualDevice(DeviceOptions options)
    : options_(std::move(options)), rng_(options_.noise.seed) {
  if (options_.eeprom_file) {
    if (std::filesystem::exists(*options_.eeprom_file))
      options_.eeprom = read_eeprom_image(*options_.eeprom_file);
    else
      write_eeprom_image(*options_.eeprom_file, options_.eeprom);
  }
  validate_block(options_.eeprom);
  hardware_ = options_.hardware.value_or(options_.eeprom);
  validate_block(hardware_);
  for (const auto& load : options_.loads) validate_scenario(load);
  if (options_.noise.current_rms < 0.0 || options_.noise.voltage_rms < 0.0)
    throw ConfigError("noise rms must be >= 0");
}

void VirtualDevice::handle_command(std::span<const std::uint8_t> bytes,
                                   std::vector<std::uint8_t>& reply) {
  for (std::uint8_t b : bytes) {
    if (write_buffer_) {
      write_buffer_->push_back(b);
      if (write_buffer_->size() == kConfigBlockSize) commit_write();
      continue;
    }
    if (auto cmd = command_from_byte(b))
      execute(*cmd, reply);
    else
      ++unknown_commands_;
  }
}

void VirtualDevice::execute(Command cmd, std::vector<std::uint8_t>& reply) {
  switch (cmd) {
    case Command::kStartStream:
      if (!halted_) streaming_ = true;
      break;
    case Command::kStopStream:
      streaming_ = false;
      break;
    case Command::kReadConfig: {
      const auto bytes = serialize_config(eeprom());
      reply.insert(reply.end(), bytes.begin(), bytes.end());
      break;
    }
    case Command::kWriteConfig:
      write_buffer_.emplace();
      write_buffer_->reserve(kConfigBlockSize);
      break;
    case Command::kMarkNext:
      ++pending_markers_;
      break;
    case Command::kGetVersion: {
      const std::string v = std::string(kDeviceVersion) + "\n";
      reply.insert(reply.end(), v.begin(), v.end());
      break;
    }
    case Command::kReboot:
      clock_ = DeviceClock{};
      streaming_ = false;
      pending_markers_ = 0;
      break;
    case Command::kRebootToDfu: {
      // No firmware upload is emulated; the stream stays down until restart.
      static constexpr char kAck[] = "DFU\n";
      reply.insert(reply.end(), kAck, kAck + 4);
      streaming_ = false;
      halted_ = true;
      break;
    }
  }
}

void VirtualDevice::commit_write() {
  auto bytes = std::move(*write_buffer_);
  write_buffer_.reset();
  ConfigBlock block;
  try {
    block = parse_config(bytes);
    validate_block(block);
  } catch (const Error&) {
    ++rejected_writes_;
    return;
  }
  {
    std::lock_guard lock(mu_);
    options_.eeprom = block;
  }
  if (options_.eeprom_file) write_eeprom_image(*options_.eeprom_file, block);
}

void VirtualDevice::tick(std::vector<std::uint8_t>& out) {
  if (!streaming_) return;

  std::lock_guard lock(mu_);
  const auto ts = encode_timestamp(clock_.timestamp());
  out.insert(out.end(), ts.begin(), ts.end());
  ++timestamp_frames_;

  const auto tick_start_ns = static_cast<std::int64_t>(clock_.micros) * 1000;
  std::array<LoadSample, kSubSamples> loads{};
  std::array<std::uint16_t, kSubSamples> levels{};

  for (std::size_t s = 0; s < kMaxSensors; ++s) {
    if (!options_.eeprom[s].enabled) continue;
    const auto& hw = hardware_[s];
    const auto& scenario = options_.loads[s / 2];
    const bool is_current = hw.kind == SensorKind::kCurrent;
    const double sigma =
        std::abs(static_cast<double>(hw.slope)) *
        (is_current ? options_.noise.current_rms : options_.noise.voltage_rms);

    for (int j = 0; j < kSubSamples; ++j) {
      const auto t_ns = tick_start_ns + j * kRoundNanos + static_cast<std::int64_t>(s) * kConversionNanos;
      loads[j] = evaluate(scenario, static_cast<double>(t_ns) * 1e-9);
      const double physical = is_current ? loads[j].amps : loads[j].volts;
      double adc = sensor_transfer(physical, hw);
      if (sigma > 0.0) adc += sigma * gauss_(rng_);
      levels[j] = quantize(adc, hw.vref);
    }

    SampleFrame frame{static_cast<std::uint8_t>(s), false, average_subsamples(levels)};
    if (s == 0 && pending_markers_ > 0) {
      frame.marker = true;
      --pending_markers_;
      ++markers_;
    }
    const auto bytes = encode_sample(frame);
    out.insert(out.end(), bytes.begin(), bytes.end());
    ++sample_frames_;
  }

  clock_.micros += kTickMicros;
  ++ticks_;
}

void VirtualDevice::reset_link() {
  streaming_ = false;
  write_buffer_.reset();
}

ConfigBlock VirtualDevice::eeprom() const {
  std::lock_guard lock(mu_);
  return options_.eeprom;
}

void VirtualDevice::set_load(std::size_t pair, LoadScenario scenario) {
  if (pair >= kMaxPairs) throw ConfigError("pair index out of range");
  validate_scenario(scenario);
  std::lock_guard lock(mu_);
  options_.loads[pair] = std::move(scenario);
}

DeviceCounters VirtualDevice::counters() const {
  return {ticks_.load(), timestamp_frames_.load(), sample_frames_.load(),
          markers_.load(), unknown_commands_.load(), rejected_writes_.load()};
}

}  // namespace ps3
