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

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prk/oblivious_transfer.hpp"
#include "prk/paillier.hpp"

namespace prk::wire {

using Bytes = std::vector<std::uint8_t>;

enum class Tag : std::uint8_t {
  Phase1 = 0x01,
  Phase1Reply = 0x02,
  FetchDirect = 0x03,
  Documents = 0x04,
  OtB = 0x05,
  OtWrapped = 0x06,
  OtA = 0x08,
  InfoRequest = 0x10,
  Info = 0x11,
  Error = 0x7F,
};

const char* to_string(Tag tag);

enum class Mode : std::uint8_t { Standard = 0, PrivacyIgnorant = 1, PrivacyConscious = 2 };

const char* to_string(Mode mode);

// u32 big-endian payload length || tag || payload.
struct Frame {
  Tag tag = Tag::Error;
  Bytes payload;

  std::size_t wire_size() const { return 5 + payload.size(); }
  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kMaxPayload = std::size_t{1} << 31;

Bytes encode_frame(const Frame& frame);
// Decodes one frame from the front of buffer; nullopt if more bytes are needed.
std::optional<Frame> decode_frame(std::span<const std::uint8_t> buffer, std::size_t& consumed);

// Big-endian primitive writer. Big integers are u32 length || magnitude.
class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u16(std::uint16_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& f64(double v);
  Writer& bigint(const mpz_class& v);
  Writer& bytes(std::span<const std::uint8_t> v);  // u32 length prefix
  Writer& raw(std::span<const std::uint8_t> v);
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Reader over a payload; every underrun raises ProtocolError.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  mpz_class bigint();
  Bytes bytes();
  std::span<const std::uint8_t> raw(std::size_t n);
  std::size_t remaining() const { return in_.size() - pos_; }
  // Count prefix whose elements need at least min_element_bytes each.
  std::uint32_t count(std::size_t min_element_bytes);
  void expect_end() const;

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

namespace flags {
inline constexpr std::uint8_t kStartOt = 0x01;    // cloud opens OT (sends A) with its reply
inline constexpr std::uint8_t kSeparateA = 0x02;  // ... as its own OT_A frame
}  // namespace flags

// 0x01: u32 n, u8 has_embedding, [n binary64], u32 k', u32 k, u8 has_he,
// [u8 scale_bits, modulus, n ciphertexts], u8 mode, u8 flags, u8 ot_group.
struct Phase1 {
  std::uint32_t n = 0;
  std::optional<std::vector<double>> embedding;
  std::uint32_t k_prime = 0;
  std::uint32_t k = 0;
  std::uint8_t scale_bits = 0;
  std::optional<mpz_class> he_modulus;
  std::vector<he::Ciphertext> ciphertexts;
  Mode mode = Mode::Standard;
  std::uint8_t flags = 0;
  ot::GroupId ot_group = ot::GroupId::Modp2048;
};

// 0x02: u32 k', k' ciphertexts, u8 has_A, [A].
struct Phase1Reply {
  std::vector<he::Ciphertext> ciphertexts;
  std::optional<mpz_class> ot_a;
};

// 0x03: u32 k, k x u32 positions.
struct FetchDirect {
  std::vector<std::uint32_t> positions;
};

// 0x04: u32 count, count length-prefixed texts.
struct Documents {
  std::vector<std::string> texts;
};

// 0x05: u32 k', k' group elements.
struct OtB {
  std::vector<mpz_class> values;
};

// 0x06: u32 k', k' x (u32 length || ciphertext || 16-byte tag).
struct OtWrapped {
  std::vector<ot::WrappedMessage> messages;
};

// 0x08: A on its own (unmerged schedule).
struct OtA {
  mpz_class value;
};

// 0x11: u32 n, u64 N.
struct Info {
  std::uint32_t dimension = 0;
  std::uint64_t corpus_size = 0;
};

// 0x7F: u16 code, length-prefixed message.
struct Error {
  std::uint16_t code = 0;
  std::string message;
};

namespace error_code {
inline constexpr std::uint16_t kProtocol = 1;
inline constexpr std::uint16_t kDomain = 2;
inline constexpr std::uint16_t kInternal = 3;
}  // namespace error_code

Frame encode(const Phase1& m);
Frame encode(const Phase1Reply& m);
Frame encode(const FetchDirect& m);
Frame encode(const Documents& m);
Frame encode(const OtB& m);
Frame encode(const OtWrapped& m);
Frame encode(const OtA& m);
Frame encode(const Info& m);
Frame encode(const Error& m);
Frame info_request();

// Each decoder checks the tag and rejects trailing bytes. An ERROR frame
// passed to any decoder is rethrown as ProtocolError carrying its message.
Phase1 decode_phase1(const Frame& f);
Phase1Reply decode_phase1_reply(const Frame& f);
FetchDirect decode_fetch_direct(const Frame& f);
Documents decode_documents(const Frame& f);
OtB decode_ot_b(const Frame& f);
OtWrapped decode_ot_wrapped(const Frame& f);
OtA decode_ot_a(const Frame& f);
Info decode_info(const Frame& f);
Error decode_error(const Frame& f);

}  // namespace prk::wire
