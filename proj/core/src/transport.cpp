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

#include "ps3/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <termios.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "ps3/error.hpp"

namespace ps3 {

namespace {

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

// Bounded single-direction byte queue shared by two channel endpoints.
class ByteQueue {
 public:
  explicit ByteQueue(std::size_t capacity) : capacity_(capacity) {}

  std::size_t pop(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [&] { return !data_.empty() || closed_; })) return 0;
    if (data_.empty()) throw TransportClosed("channel closed");
    const auto n = std::min(buf.size(), data_.size());
    std::copy_n(data_.begin(), n, buf.begin());
    data_.erase(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n));
    cv_.notify_all();
    return n;
  }

  void push(std::span<const std::uint8_t> bytes) {
    std::unique_lock lock(mu_);
    while (!bytes.empty()) {
      cv_.wait(lock, [&] { return data_.size() < capacity_ || closed_; });
      if (closed_) throw TransportClosed("channel closed");
      const auto n = std::min(bytes.size(), capacity_ - data_.size());
      data_.insert(data_.end(), bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
      bytes = bytes.subspan(n);
      cv_.notify_all();
    }
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::uint8_t> data_;
  std::size_t capacity_;
  bool closed_ = false;
};

class ChannelEnd : public Transport {
 public:
  ChannelEnd(std::shared_ptr<ByteQueue> in, std::shared_ptr<ByteQueue> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~ChannelEnd() override { close(); }

  std::size_t read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) override {
    return in_->pop(buf, timeout);
  }
  void write(std::span<const std::uint8_t> data) override { out_->push(data); }
  void close() override {
    in_->close();
    out_->close();
  }

 private:
  std::shared_ptr<ByteQueue> in_;
  std::shared_ptr<ByteQueue> out_;
};

// Reads wait on poll(); writes poll in slices so close() from another
// thread is noticed.
class FdTransport : public Transport {
 public:
  FdTransport(int fd, std::string name, int keepalive_fd = -1)
      : fd_(fd), keepalive_fd_(keepalive_fd), name_(std::move(name)) {
    ::fcntl(fd_, F_SETFL, ::fcntl(fd_, F_GETFL) | O_NONBLOCK);
  }
  ~FdTransport() override {
    close();
    ::close(fd_);
    if (keepalive_fd_ >= 0) ::close(keepalive_fd_);
  }

  std::size_t read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) override {
    if (closed_) throw TransportClosed(name_ + ": closed");
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc < 0) {
      if (errno == EINTR) return 0;
      throw TransportError(errno_text(name_ + ": poll"));
    }
    if (rc == 0) return 0;
    const auto n = ::read(fd_, buf.data(), buf.size());
    if (n > 0) return static_cast<std::size_t>(n);
    if (n == 0) throw TransportClosed(name_ + ": end of stream");
    if (errno == EAGAIN || errno == EINTR) return 0;
    if (errno == EIO || errno == ECONNRESET) throw TransportClosed(errno_text(name_));
    throw TransportError(errno_text(name_ + ": read"));
  }

  void write(std::span<const std::uint8_t> data) override {
    while (!data.empty()) {
      if (closed_) throw TransportClosed(name_ + ": closed");
      const auto n = send_or_write(fd_, data);
      if (n > 0) {
        data = data.subspan(static_cast<std::size_t>(n));
        continue;
      }
      if (n < 0 && errno != EAGAIN && errno != EINTR) {
        if (errno == EPIPE || errno == EIO || errno == ECONNRESET)
          throw TransportClosed(errno_text(name_));
        throw TransportError(errno_text(name_ + ": write"));
      }
      pollfd pfd{fd_, POLLOUT, 0};
      ::poll(&pfd, 1, 100);
    }
  }

  void close() override { closed_ = true; }

 private:
  static ssize_t send_or_write(int fd, std::span<const std::uint8_t> data) {
    const auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) return ::write(fd, data.data(), data.size());
    return n;
  }

  int fd_;
  int keepalive_fd_;
  std::string name_;
  std::atomic<bool> closed_{false};
};

void make_raw(int fd) {
  termios tio{};
  if (::tcgetattr(fd, &tio) != 0) return;
  ::cfmakeraw(&tio);
  tio.c_cc[VMIN] = 0;
  tio.c_cc[VTIME] = 0;
  ::tcsetattr(fd, TCSANOW, &tio);
}

}  // namespace

std::pair<TransportPtr, TransportPtr> make_channel_pair(std::size_t capacity) {
  auto a_to_b = std::make_shared<ByteQueue>(capacity);
  auto b_to_a = std::make_shared<ByteQueue>(capacity);
  return {std::make_unique<ChannelEnd>(b_to_a, a_to_b), std::make_unique<ChannelEnd>(a_to_b, b_to_a)};
}

TransportPtr open_serial(const std::string& path) {
  const int fd = ::open(path.c_str(), O_RDWR | O_NOCTTY | O_NONBLOCK | O_CLOEXEC);
  if (fd < 0) throw TransportError(errno_text("cannot open " + path));
  if (::isatty(fd)) make_raw(fd);
  return std::make_unique<FdTransport>(fd, path);
}

TransportPtr open_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  std::string last_error = "no addresses";
  for (auto* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<FdTransport>(fd, "tcp:" + host + ":" + service);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(res);
  throw TransportError("cannot connect to " + host + ":" + service + ": " + last_error);
}

PtyEndpoint open_pty() {
  const int master = ::posix_openpt(O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (master < 0) throw TransportError(errno_text("posix_openpt"));
  if (::grantpt(master) != 0 || ::unlockpt(master) != 0) {
    ::close(master);
    throw TransportError(errno_text("pty setup"));
  }
  char name[128];
  if (::ptsname_r(master, name, sizeof name) != 0) {
    ::close(master);
    throw TransportError(errno_text("ptsname"));
  }
  const int slave = ::open(name, O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (slave < 0) {
    ::close(master);
    throw TransportError(errno_text(std::string("cannot open ") + name));
  }
  make_raw(slave);
  return {std::make_unique<FdTransport>(master, "pty master", slave), name};
}

TcpServer::TcpServer(std::uint16_t port, const std::string& bind_address) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw TransportError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("invalid bind address " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 1) != 0) {
    const auto msg = errno_text("cannot listen on port " + std::to_string(port));
    ::close(listen_fd_);
    throw TransportError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  drop_client();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::drop_client() {
  if (client_fd_ >= 0) ::close(client_fd_);
  client_fd_ = -1;
}

std::size_t TcpServer::read(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout) {
  if (listen_fd_ < 0) throw TransportClosed("server closed");
  const int fd = client_fd_ >= 0 ? client_fd_ : listen_fd_;
  pollfd pfd{fd, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return 0;
  if (client_fd_ < 0) {
    client_fd_ = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK);
    if (client_fd_ >= 0) {
      int one = 1;
      ::setsockopt(client_fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }
    return 0;
  }
  const auto n = ::recv(client_fd_, buf.data(), buf.size(), MSG_DONTWAIT);
  if (n > 0) return static_cast<std::size_t>(n);
  if (n < 0 && (errno == EAGAIN || errno == EINTR)) return 0;
  drop_client();
  throw TransportClosed("client disconnected");
}

void TcpServer::write(std::span<const std::uint8_t> data) {
  while (client_fd_ >= 0 && !data.empty()) {
    const auto n = ::send(client_fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n > 0) {
      data = data.subspan(static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EINTR)) {
      pollfd pfd{client_fd_, POLLOUT, 0};
      ::poll(&pfd, 1, 100);
      continue;
    }
    drop_client();
    throw TransportClosed("client disconnected");
  }
}

void TcpServer::close() {
  drop_client();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

}  // namespace ps3
