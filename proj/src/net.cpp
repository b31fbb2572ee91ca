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

#include "net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>

#include "cpsflow/error.hpp"

namespace cpsflow::net {

namespace {

const char* const kModule = "remote_learner";

using Clock = std::chrono::steady_clock;

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) freeaddrinfo(head);
  }
};

void resolve(const Endpoint& endpoint, bool passive, AddrInfo& out, ErrorCode on_error) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(endpoint.port);
  const char* host = endpoint.host.empty() ? nullptr : endpoint.host.c_str();
  const int rc = getaddrinfo(host, port.c_str(), &hints, &out.head);
  if (rc != 0) fail(on_error, "cannot resolve '" + endpoint.host + "': " + gai_strerror(rc));
}

}  // namespace

Endpoint parse_endpoint(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos) fail(ErrorCode::InvalidArgument, "address must be host:port");
  Endpoint ep;
  ep.host = std::string(address.substr(0, colon));
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') ep.host = ep.host.substr(1, ep.host.size() - 2);
  const auto port = address.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    fail(ErrorCode::InvalidArgument, "invalid port in address '" + std::string(address) + "'");
  }
  ep.port = static_cast<std::uint16_t>(value);
  return ep;
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket connect_to(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  AddrInfo info;
  resolve(endpoint, false, info, ErrorCode::ConnectFailed);
  std::string last_error = "no addresses";
  for (addrinfo* ai = info.head; ai != nullptr; ai = ai->ai_next) {
    Socket sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!sock.valid()) {
      last_error = std::strerror(errno);
      continue;
    }
    const int flags = fcntl(sock.fd(), F_GETFL, 0);
    fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(sock.fd(), ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{sock.fd(), POLLOUT, 0};
      rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (rc == 0) fail(ErrorCode::Timeout, "connect to " + endpoint.host + ":" + std::to_string(endpoint.port) + " timed out");
      int err = 0;
      socklen_t len = sizeof(err);
      getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err == 0 ? 0 : -1;
      errno = err;
    }
    if (rc != 0) {
      last_error = std::strerror(errno);
      continue;
    }
    fcntl(sock.fd(), F_SETFL, flags);
    int one = 1;
    setsockopt(sock.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return sock;
  }
  fail(ErrorCode::ConnectFailed,
       "cannot connect to " + endpoint.host + ":" + std::to_string(endpoint.port) + ": " + last_error);
}

Socket listen_on(const Endpoint& endpoint, int backlog) {
  AddrInfo info;
  resolve(endpoint, true, info, ErrorCode::BindFailed);
  std::string last_error = "no addresses";
  for (addrinfo* ai = info.head; ai != nullptr; ai = ai->ai_next) {
    Socket sock(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!sock.valid()) {
      last_error = std::strerror(errno);
      continue;
    }
    int one = 1;
    setsockopt(sock.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(sock.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(sock.fd(), backlog) != 0) {
      last_error = std::strerror(errno);
      continue;
    }
    return sock;
  }
  fail(ErrorCode::BindFailed, "cannot listen on " + endpoint.host + ":" + std::to_string(endpoint.port) + ": " + last_error);
}

std::uint16_t local_port(const Socket& socket) {
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  if (getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
  if (addr.ss_family == AF_INET) return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  if (addr.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  return 0;
}

bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout) {
  pollfd pfd{socket.fd(), POLLIN, 0};
  for (;;) {
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::max<std::int64_t>(0, timeout.count())));
    if (rc < 0 && errno == EINTR) continue;
    return rc > 0;
  }
}

void send_all(const Socket& socket, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(socket.fd(), data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::ConnectionClosed, std::string("send failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

ReadStatus LineReader::read_line(const Socket& socket, std::chrono::milliseconds timeout, std::string& line) {
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      if (discarding_) {
        buffer_.erase(0, nl + 1);
        discarding_ = false;
        continue;
      }
      line.assign(buffer_, 0, nl);
      buffer_.erase(0, nl + 1);
      if (line.size() > max_frame_) return ReadStatus::TooLarge;
      return ReadStatus::Line;
    }
    if (discarding_) {
      buffer_.clear();
    } else if (buffer_.size() > max_frame_) {
      buffer_.clear();
      discarding_ = true;
      return ReadStatus::TooLarge;
    }

    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0 || !wait_readable(socket, remaining)) return ReadStatus::TimedOut;

    char chunk[65536];
    const ssize_t n = ::recv(socket.fd(), chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::Closed;
    }
    if (n == 0) return ReadStatus::Closed;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace cpsflow::net
