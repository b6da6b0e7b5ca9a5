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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>

#include "prk/protocol.hpp"
#include "prk/vector_store.hpp"
#include "prk/wire.hpp"

namespace prk::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  // "host:port"; a bare ":port" binds every interface.
  static Endpoint parse(const std::string& text);
};

// Blocking TCP client carrying length-prefixed frames.
class TcpTransport : public protocol::Transport {
 public:
  explicit TcpTransport(const Endpoint& endpoint);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(const wire::Frame& frame) override;
  wire::Frame receive() override;

 private:
  int fd_ = -1;
};

// Reads / writes one frame on a connected socket. read_frame returns false
// on a clean close before the first byte.
bool read_frame(int fd, wire::Frame& out);
void write_frame(int fd, const wire::Frame& frame);

// Serves retrieval sessions, one thread and one CloudSession per connection,
// until stop becomes true. on_ready receives the bound port.
void serve(const store::Store& store, const Endpoint& listen, const std::atomic<bool>& stop,
           const std::function<void(std::uint16_t)>& on_ready = {});

}  // namespace prk::net
