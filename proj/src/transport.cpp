// Copyright 2026 The prk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prk/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <memory>
#include <thread>
#include <vector>

#include "prk/errors.hpp"

namespace prk::net {
namespace {

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

bool read_exact(int fd, std::uint8_t* buf, std::size_t n, bool allow_eof_at_start) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && allow_eof_at_start) return false;
      throw ProtocolError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(sys_error("recv"));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, const std::uint8_t* buf, std::size_t n) {
  std::size_t sent = 0;
  while (sent < n) {
    const ssize_t r = ::send(fd, buf + sent, n - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(sys_error("send"));
    }
    sent += static_cast<std::size_t>(r);
  }
}

addrinfo* resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw ConfigError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  return res;
}

void serve_connection(const store::Store& store, int fd) {
  protocol::CloudSession session(store);
  try {
    wire::Frame frame;
    while (read_frame(fd, frame)) {
      for (const auto& reply : session.handle_or_error(frame)) write_frame(fd, reply);
    }
  } catch (const std::exception&) {
    // Peer went away or sent garbage framing; drop the connection.
  }
  ::shutdown(fd, SHUT_RDWR);
}

struct Connection {
  int fd;
  std::atomic<bool> done{false};
  std::thread worker;
};

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ConfigError("address must be host:port, got '" + text + "'");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') {
    ep.host = ep.host.substr(1, ep.host.size() - 2);
  }
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long value = std::stoul(port, &used);
    if (used != port.size() || value > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(value);
  } catch (const std::exception&) {
    throw ConfigError("bad port in '" + text + "'");
  }
  return ep;
}

bool read_frame(int fd, wire::Frame& out) {
  std::uint8_t header[5];
  if (!read_exact(fd, header, sizeof header, true)) return false;
  const std::uint32_t length = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                               (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (length > wire::kMaxPayload) throw ProtocolError("frame payload too large");
  out.tag = static_cast<wire::Tag>(header[4]);
  out.payload.resize(length);
  if (length > 0) read_exact(fd, out.payload.data(), length, false);
  return true;
}

void write_frame(int fd, const wire::Frame& frame) {
  const wire::Bytes bytes = wire::encode_frame(frame);
  write_all(fd, bytes.data(), bytes.size());
}

TcpTransport::TcpTransport(const Endpoint& endpoint) {
  addrinfo* res = resolve(endpoint, false);
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw ProtocolError(sys_error(("connect to " + endpoint.host).c_str()));
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::send(const wire::Frame& frame) { write_frame(fd_, frame); }

wire::Frame TcpTransport::receive() {
  wire::Frame frame;
  if (!read_frame(fd_, frame)) throw ProtocolError("server closed the connection");
  return frame;
}

void serve(const store::Store& store, const Endpoint& listen, const std::atomic<bool>& stop,
           const std::function<void(std::uint16_t)>& on_ready) {
  addrinfo* res = resolve(listen, true);
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw ConfigError(sys_error("bind"));

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  const std::uint16_t port = ntohs(bound.ss_family == AF_INET6
                                       ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                       : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  if (on_ready) on_ready(port);

  std::vector<std::unique_ptr<Connection>> connections;
  while (!stop.load()) {
    pollfd pfd{fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 200);
    if (ready <= 0) continue;
    const int client = ::accept(fd, nullptr, nullptr);
    if (client < 0) continue;
    int one = 1;
    ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_unique<Connection>();
    conn->fd = client;
    Connection* raw = conn.get();
    conn->worker = std::thread([&store, raw] {
      serve_connection(store, raw->fd);
      raw->done.store(true);
    });
    connections.push_back(std::move(conn));
    std::erase_if(connections, [](const std::unique_ptr<Connection>& c) {
      if (!c->done.load()) return false;
      c->worker.join();
      ::close(c->fd);
      return true;
    });
  }
  ::close(fd);
  for (auto& c : connections) {
    ::shutdown(c->fd, SHUT_RDWR);
    c->worker.join();
    ::close(c->fd);
  }
}

}  // namespace prk::net
