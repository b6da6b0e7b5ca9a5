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

#include "prk/wire.hpp"

#include <bit>
#include <string>

#include "prk/bigint.hpp"
#include "prk/errors.hpp"

namespace prk::wire {
namespace {

void expect_tag(const Frame& f, Tag tag) {
  if (f.tag == Tag::Error && tag != Tag::Error) {
    const Error e = decode_error(f);
    throw ProtocolError("peer error " + std::to_string(e.code) + ": " + e.message);
  }
  if (f.tag != tag) {
    throw ProtocolError(std::string("expected ") + to_string(tag) + " frame, got " +
                        to_string(f.tag));
  }
}

}  // namespace

const char* to_string(Tag tag) {
  switch (tag) {
    case Tag::Phase1: return "PHASE1";
    case Tag::Phase1Reply: return "PHASE1_REPLY";
    case Tag::FetchDirect: return "FETCH_DIRECT";
    case Tag::Documents: return "DOCUMENTS";
    case Tag::OtB: return "OT_B";
    case Tag::OtWrapped: return "OT_WRAPPED";
    case Tag::OtA: return "OT_A";
    case Tag::InfoRequest: return "INFO_REQUEST";
    case Tag::Info: return "INFO";
    case Tag::Error: return "ERROR";
  }
  return "UNKNOWN";
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Standard: return "standard";
    case Mode::PrivacyIgnorant: return "ignorant";
    case Mode::PrivacyConscious: return "conscious";
  }
  return "unknown";
}

Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) throw ProtocolError("frame payload too large");
  Writer w;
  w.u32(static_cast<std::uint32_t>(frame.payload.size()));
  w.u8(static_cast<std::uint8_t>(frame.tag));
  w.raw(frame.payload);
  return w.take();
}

std::optional<Frame> decode_frame(std::span<const std::uint8_t> buffer, std::size_t& consumed) {
  consumed = 0;
  if (buffer.size() < 5) return std::nullopt;
  Reader r(buffer);
  const std::uint32_t length = r.u32();
  if (length > kMaxPayload) throw ProtocolError("frame payload too large");
  const auto tag = static_cast<Tag>(r.u8());
  if (r.remaining() < length) return std::nullopt;
  const auto body = r.raw(length);
  consumed = 5 + static_cast<std::size_t>(length);
  return Frame{tag, Bytes(body.begin(), body.end())};
}

Writer& Writer::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Writer& Writer::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

Writer& Writer::bigint(const mpz_class& v) { return bytes(bigint::to_bytes(v)); }

Writer& Writer::bytes(std::span<const std::uint8_t> v) {
  if (v.size() > kMaxPayload) throw ProtocolError("field too large");
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

Writer& Writer::raw(std::span<const std::uint8_t> v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

std::span<const std::uint8_t> Reader::raw(std::size_t n) {
  if (remaining() < n) throw ProtocolError("truncated message");
  const auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint16_t Reader::u16() {
  const auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t Reader::u32() {
  std::uint32_t v = 0;
  for (std::uint8_t b : raw(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t Reader::u64() {
  std::uint64_t v = 0;
  for (std::uint8_t b : raw(8)) v = (v << 8) | b;
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

mpz_class Reader::bigint() { return bigint::from_bytes(raw(u32())); }

Bytes Reader::bytes() {
  const auto b = raw(u32());
  return Bytes(b.begin(), b.end());
}

std::uint32_t Reader::count(std::size_t min_element_bytes) {
  const std::uint32_t n = u32();
  if (min_element_bytes > 0 && n > remaining() / min_element_bytes) {
    throw ProtocolError("element count exceeds message size");
  }
  return n;
}

void Reader::expect_end() const {
  if (remaining() != 0) throw ProtocolError("trailing bytes in message");
}

Frame encode(const Phase1& m) {
  Writer w;
  w.u32(m.n);
  w.u8(m.embedding ? 1 : 0);
  if (m.embedding) {
    if (m.embedding->size() != m.n) throw DomainError("embedding length differs from n");
    for (double x : *m.embedding) w.f64(x);
  }
  w.u32(m.k_prime).u32(m.k);
  w.u8(m.he_modulus ? 1 : 0);
  if (m.he_modulus) {
    if (m.ciphertexts.size() != m.n) throw DomainError("ciphertext count differs from n");
    w.u8(m.scale_bits).bigint(*m.he_modulus);
    for (const auto& c : m.ciphertexts) w.bigint(c.value);
  }
  w.u8(static_cast<std::uint8_t>(m.mode)).u8(m.flags).u8(static_cast<std::uint8_t>(m.ot_group));
  return Frame{Tag::Phase1, w.take()};
}

Phase1 decode_phase1(const Frame& f) {
  expect_tag(f, Tag::Phase1);
  Reader r(f.payload);
  Phase1 m;
  m.n = r.u32();
  const std::uint8_t has_embedding = r.u8();
  if (has_embedding > 1) throw ProtocolError("bad embedding flag");
  if (has_embedding) {
    if (m.n > r.remaining() / 8) throw ProtocolError("truncated embedding");
    std::vector<double> e(m.n);
    for (double& x : e) x = r.f64();
    m.embedding = std::move(e);
  }
  m.k_prime = r.u32();
  m.k = r.u32();
  const std::uint8_t has_he = r.u8();
  if (has_he > 1) throw ProtocolError("bad encryption flag");
  if (has_he) {
    m.scale_bits = r.u8();
    m.he_modulus = r.bigint();
    if (m.n > r.remaining() / 4) throw ProtocolError("truncated ciphertexts");
    m.ciphertexts.reserve(m.n);
    for (std::uint32_t i = 0; i < m.n; ++i) m.ciphertexts.push_back(he::Ciphertext{r.bigint()});
  }
  const std::uint8_t mode = r.u8();
  if (mode > 2) throw ProtocolError("unknown mode");
  m.mode = static_cast<Mode>(mode);
  m.flags = r.u8();
  const std::uint8_t group = r.u8();
  if (group > 1) throw ProtocolError("unknown OT group");
  m.ot_group = static_cast<ot::GroupId>(group);
  r.expect_end();
  return m;
}

Frame encode(const Phase1Reply& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.ciphertexts.size()));
  for (const auto& c : m.ciphertexts) w.bigint(c.value);
  w.u8(m.ot_a ? 1 : 0);
  if (m.ot_a) w.bigint(*m.ot_a);
  return Frame{Tag::Phase1Reply, w.take()};
}

Phase1Reply decode_phase1_reply(const Frame& f) {
  expect_tag(f, Tag::Phase1Reply);
  Reader r(f.payload);
  Phase1Reply m;
  const std::uint32_t count = r.count(4);
  m.ciphertexts.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) m.ciphertexts.push_back(he::Ciphertext{r.bigint()});
  const std::uint8_t has_a = r.u8();
  if (has_a > 1) throw ProtocolError("bad OT flag");
  if (has_a) m.ot_a = r.bigint();
  r.expect_end();
  return m;
}

Frame encode(const FetchDirect& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.positions.size()));
  for (std::uint32_t p : m.positions) w.u32(p);
  return Frame{Tag::FetchDirect, w.take()};
}

FetchDirect decode_fetch_direct(const Frame& f) {
  expect_tag(f, Tag::FetchDirect);
  Reader r(f.payload);
  FetchDirect m;
  const std::uint32_t count = r.count(4);
  m.positions.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) m.positions.push_back(r.u32());
  r.expect_end();
  return m;
}

Frame encode(const Documents& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.texts.size()));
  for (const auto& t : m.texts) {
    w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(t.data()), t.size()));
  }
  return Frame{Tag::Documents, w.take()};
}

Documents decode_documents(const Frame& f) {
  expect_tag(f, Tag::Documents);
  Reader r(f.payload);
  Documents m;
  const std::uint32_t count = r.count(4);
  m.texts.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const Bytes b = r.bytes();
    m.texts.emplace_back(b.begin(), b.end());
  }
  r.expect_end();
  return m;
}

Frame encode(const OtB& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.values.size()));
  for (const auto& v : m.values) w.bigint(v);
  return Frame{Tag::OtB, w.take()};
}

OtB decode_ot_b(const Frame& f) {
  expect_tag(f, Tag::OtB);
  Reader r(f.payload);
  OtB m;
  const std::uint32_t count = r.count(4);
  m.values.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) m.values.push_back(r.bigint());
  r.expect_end();
  return m;
}

Frame encode(const OtWrapped& m) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.messages.size()));
  for (const auto& msg : m.messages) w.bytes(msg.ciphertext).raw(msg.tag);
  return Frame{Tag::OtWrapped, w.take()};
}

OtWrapped decode_ot_wrapped(const Frame& f) {
  expect_tag(f, Tag::OtWrapped);
  Reader r(f.payload);
  OtWrapped m;
  const std::uint32_t count = r.count(4 + 16);
  m.messages.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ot::WrappedMessage msg;
    msg.ciphertext = r.bytes();
    const auto tag = r.raw(msg.tag.size());
    std::copy(tag.begin(), tag.end(), msg.tag.begin());
    m.messages.push_back(std::move(msg));
  }
  r.expect_end();
  return m;
}

Frame encode(const OtA& m) {
  Writer w;
  w.bigint(m.value);
  return Frame{Tag::OtA, w.take()};
}

OtA decode_ot_a(const Frame& f) {
  expect_tag(f, Tag::OtA);
  Reader r(f.payload);
  OtA m{r.bigint()};
  r.expect_end();
  return m;
}

Frame encode(const Info& m) {
  Writer w;
  w.u32(m.dimension).u64(m.corpus_size);
  return Frame{Tag::Info, w.take()};
}

Info decode_info(const Frame& f) {
  expect_tag(f, Tag::Info);
  Reader r(f.payload);
  Info m;
  m.dimension = r.u32();
  m.corpus_size = r.u64();
  r.expect_end();
  return m;
}

Frame encode(const Error& m) {
  Writer w;
  w.u16(m.code).bytes(std::span(reinterpret_cast<const std::uint8_t*>(m.message.data()),
                                m.message.size()));
  return Frame{Tag::Error, w.take()};
}

Error decode_error(const Frame& f) {
  if (f.tag != Tag::Error) throw ProtocolError("expected ERROR frame");
  Reader r(f.payload);
  Error m;
  m.code = r.u16();
  const Bytes b = r.bytes();
  m.message.assign(b.begin(), b.end());
  r.expect_end();
  return m;
}

Frame info_request() { return Frame{Tag::InfoRequest, {}}; }

}  // namespace prk::wire
