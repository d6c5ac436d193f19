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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace ps3 {

/// Bidirectional byte link. One reader and any number of serialized writers
/// may use it concurrently.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Reads up to `buf.size()` bytes, waiting at most `timeout` for the first
  /// one. Returns 0 on timeout; throws TransportClosed once the peer is gone.
  virtual std::size_t read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) = 0;

  /// Writes every byte, blocking while the link is full.
  virtual void write(std::span<const std::uint8_t> data) = 0;

  /// Releases the link and wakes blocked readers and writers.
  virtual void close() = 0;
};

using TransportPtr = std::unique_ptr<Transport>;

/// In-process link made of two bounded byte queues.
std::pair<TransportPtr, TransportPtr> make_channel_pair(std::size_t capacity = 1 << 16);

/// Opens a serial device or pseudo-terminal in raw mode.
TransportPtr open_serial(const std::string& path);

/// Connects to `host:port`.
TransportPtr open_tcp(const std::string& host, std::uint16_t port);

/// Device side of a pseudo-terminal. The slave end is held open so host
/// tools can come and go without hanging up the master.
struct PtyEndpoint {
  TransportPtr master;
  std::string slave_path;
};
PtyEndpoint open_pty();

/// Listening socket serving one client at a time. read() accepts pending
/// connections; a client disconnect surfaces once as TransportClosed.
class TcpServer : public Transport {
 public:
  /// Port 0 picks a free port; see port().
  explicit TcpServer(std::uint16_t port, const std::string& bind_address = "127.0.0.1");
  ~TcpServer() override;

  std::uint16_t port() const { return port_; }

  std::size_t read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) override;
  void write(std::span<const std::uint8_t> data) override;
  void close() override;

 private:
  void drop_client();

  int listen_fd_ = -1;
  int client_fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace ps3
