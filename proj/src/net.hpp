// Copyright 2026 The cpsflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal blocking TCP helpers for the remote learner protocol.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cpsflow::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// Parses "host:port". Throws InvalidArgument.
Endpoint parse_endpoint(std::string_view address);

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();
  /// Wakes up any thread blocked on this socket.
  void shutdown();

 private:
  int fd_ = -1;
};

Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout);
/// Listening socket; port 0 picks an ephemeral port. Throws BindFailed.
Socket listen_on(const Endpoint& endpoint, int backlog = 16);
std::uint16_t local_port(const Socket& socket);

/// Waits up to `timeout` for the socket to become readable.
bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout);

/// Sends everything. Throws ConnectionClosed.
void send_all(const Socket& socket, std::string_view data);

enum class ReadStatus { Line, Closed, TimedOut, TooLarge };

/// Accumulates bytes until LF. Bytes past the first line stay buffered.
class LineReader {
 public:
  explicit LineReader(std::size_t max_frame) : max_frame_(max_frame) {}

  /// On TooLarge the rest of the oversized line is discarded by later reads.
  ReadStatus read_line(const Socket& socket, std::chrono::milliseconds timeout, std::string& line);

  void set_max_frame(std::size_t max_frame) { max_frame_ = max_frame; }

 private:
  std::size_t max_frame_;
  std::string buffer_;
  bool discarding_ = false;
};

}  // namespace cpsflow::net
