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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ps3/sensor_config.hpp"

namespace ps3 {

inline constexpr std::size_t kMaxSensors = 8;
inline constexpr std::size_t kMaxPairs = kMaxSensors / 2;
inline constexpr std::uint16_t kMaxLevel = 1023;
inline constexpr std::uint8_t kTimestampIndex = 7;

// Byte A: [1 | index(3) | marker(1) | level 9..7]; byte B: [0 | level 6..0].
inline constexpr std::uint8_t kSyncBit = 0x80;

struct SampleFrame {
  std::uint8_t sensor_index = 0;
  bool marker = false;
  std::uint16_t level = 0;

  friend bool operator==(const SampleFrame&, const SampleFrame&) = default;
};

struct TimestampFrame {
  std::uint16_t micros = 0;

  friend bool operator==(const TimestampFrame&, const TimestampFrame&) = default;
};

using StreamEvent = std::variant<SampleFrame, TimestampFrame>;
using FrameBytes = std::array<std::uint8_t, 2>;

enum class Command : std::uint8_t {
  kStartStream = 'S',
  kStopStream = 'T',
  kReadConfig = 'R',
  kWriteConfig = 'W',
  kMarkNext = 'M',
  kGetVersion = 'V',
  kReboot = 'X',
  kRebootToDfu = 'Y',
};

/// Maps a wire byte back to a command; nullopt for unknown bytes.
std::optional<Command> command_from_byte(std::uint8_t byte);

FrameBytes encode_sample(const SampleFrame& frame);
FrameBytes encode_timestamp(std::uint16_t micros);

/// Decoder state carried between calls. At most one first-byte is pending.
struct DecoderState {
  std::optional<std::uint8_t> pending;
  std::uint64_t consumed = 0;
  std::uint64_t discarded = 0;
  std::uint64_t events = 0;
};

/// Appends decoded events to `out`. Never throws on malformed input: bytes
/// that cannot form a valid frame are counted in `state.discarded`.
void decode_stream(std::span<const std::uint8_t> bytes, DecoderState& state,
                   std::vector<StreamEvent>& out);

std::vector<StreamEvent> decode_stream(std::span<const std::uint8_t> bytes,
                                       DecoderState& state);

// Config block wire format: 8 fixed-width 28-byte records laid out as
// name[12] (null padded), vref f32le, slope f32le, offset f32le, type u8,
// enabled u8, pad[2].
inline constexpr std::size_t kNameFieldSize = 12;
inline constexpr std::size_t kConfigRecordSize = 28;
inline constexpr std::size_t kConfigBlockSize = kConfigRecordSize * kMaxSensors;

std::vector<std::uint8_t> serialize_config(const ConfigBlock& block);
ConfigBlock parse_config(std::span<const std::uint8_t> bytes);

/// Command byte followed by the serialized block.
std::vector<std::uint8_t> encode_write_config(const ConfigBlock& block);

}  // namespace ps3
