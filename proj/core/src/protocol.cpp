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

#include "ps3/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

FrameBytes pack(std::uint8_t index, bool marker, std::uint16_t value) {
  const auto a = static_cast<std::uint8_t>(kSyncBit | (index << 4) | (marker ? 0x08 : 0x00) |
                                           ((value >> 7) & 0x07));
  const auto b = static_cast<std::uint8_t>(value & 0x7f);
  return {a, b};
}

// Returns false when the pair carries the marker bit on sensors 1..6.
bool unpack(std::uint8_t a, std::uint8_t b, StreamEvent& ev) {
  const auto index = static_cast<std::uint8_t>((a >> 4) & 0x07);
  const bool marker = (a & 0x08) != 0;
  const auto value = static_cast<std::uint16_t>(((a & 0x07) << 7) | (b & 0x7f));
  if (index == kTimestampIndex && marker) {
    ev = TimestampFrame{value};
    return true;
  }
  if (marker && index != 0) return false;
  ev = SampleFrame{index, marker, value};
  return true;
}

void put_f32(std::uint8_t* dst, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

float get_f32(const std::uint8_t* src) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(src[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::optional<Command> command_from_byte(std::uint8_t byte) {
  switch (byte) {
    case 'S': return Command::kStartStream;
    case 'T': return Command::kStopStream;
    case 'R': return Command::kReadConfig;
    case 'W': return Command::kWriteConfig;
    case 'M': return Command::kMarkNext;
    case 'V': return Command::kGetVersion;
    case 'X': return Command::kReboot;
    case 'Y': return Command::kRebootToDfu;
    default: return std::nullopt;
  }
}

FrameBytes encode_sample(const SampleFrame& frame) {
  if (frame.sensor_index >= kMaxSensors)
    throw ProtocolError("sensor index " + std::to_string(frame.sensor_index) + " out of range");
  if (frame.level > kMaxLevel)
    throw ProtocolError("level " + std::to_string(frame.level) + " exceeds 10 bits");
  if (frame.sensor_index == kTimestampIndex && frame.marker)
    throw ProtocolError("sensor 7 with marker is reserved for timestamps");
  if (frame.marker && frame.sensor_index != 0)
    throw ProtocolError("marker is only valid on sensor 0");
  return pack(frame.sensor_index, frame.marker, frame.level);
}

FrameBytes encode_timestamp(std::uint16_t micros) {
  if (micros > kMaxLevel)
    throw ProtocolError("timestamp " + std::to_string(micros) + " exceeds 10 bits");
  return pack(kTimestampIndex, true, micros);
}

void decode_stream(std::span<const std::uint8_t> bytes, DecoderState& state,
                   std::vector<StreamEvent>& out) {
  for (std::uint8_t byte : bytes) {
    ++state.consumed;
    if (byte & kSyncBit) {
      // A new first byte supersedes any pending one.
      if (state.pending) ++state.discarded;
      state.pending = byte;
      continue;
    }
    if (!state.pending) {
      ++state.discarded;
      continue;
    }
    StreamEvent ev;
    if (unpack(*state.pending, byte, ev)) {
      out.push_back(ev);
      ++state.events;
    } else {
      state.discarded += 2;
    }
    state.pending.reset();
  }
}

std::vector<StreamEvent> decode_stream(std::span<const std::uint8_t> bytes,
                                       DecoderState& state) {
  std::vector<StreamEvent> out;
  out.reserve(bytes.size() / 2 + 1);
  decode_stream(bytes, state, out);
  return out;
}

std::vector<std::uint8_t> serialize_config(const ConfigBlock& block) {
  std::vector<std::uint8_t> out(kConfigBlockSize, 0);
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto& s = block[i];
    if (s.name.size() > kMaxNameLength)
      throw ProtocolError("sensor " + std::to_string(i) + ": name too long");
    auto* rec = out.data() + i * kConfigRecordSize;
    std::memcpy(rec, s.name.data(), s.name.size());
    put_f32(rec + 12, s.vref);
    put_f32(rec + 16, s.slope);
    put_f32(rec + 20, s.offset);
    rec[24] = static_cast<std::uint8_t>(s.kind);
    rec[25] = s.enabled ? 1 : 0;
  }
  return out;
}

ConfigBlock parse_config(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kConfigBlockSize)
    throw ProtocolError("wrong length: expected " + std::to_string(kConfigBlockSize) +
                        " bytes, got " + std::to_string(bytes.size()));
  ConfigBlock block;
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto* rec = bytes.data() + i * kConfigRecordSize;
    auto& s = block[i];
    const auto* end = std::find(rec, rec + kNameFieldSize, std::uint8_t{0});
    s.name.assign(reinterpret_cast<const char*>(rec), reinterpret_cast<const char*>(end));
    s.vref = get_f32(rec + 12);
    s.slope = get_f32(rec + 16);
    s.offset = get_f32(rec + 20);
    if (rec[24] > 1)
      throw ProtocolError("sensor " + std::to_string(i) + ": invalid type byte " +
                          std::to_string(rec[24]));
    if (rec[25] > 1)
      throw ProtocolError("sensor " + std::to_string(i) + ": invalid enabled byte " +
                          std::to_string(rec[25]));
    s.kind = static_cast<SensorKind>(rec[24]);
    s.enabled = rec[25] == 1;
  }
  return block;
}

std::vector<std::uint8_t> encode_write_config(const ConfigBlock& block) {
  auto payload = serialize_config(block);
  payload.insert(payload.begin(), static_cast<std::uint8_t>(Command::kWriteConfig));
  return payload;
}

}  // namespace ps3
