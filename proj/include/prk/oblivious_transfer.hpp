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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prk/random.hpp"

namespace prk::ot {

using Bytes = std::vector<std::uint8_t>;
using Key = std::array<std::uint8_t, 32>;
using Tag = std::array<std::uint8_t, 16>;

enum class GroupId : std::uint8_t { Modp2048 = 0, Test256 = 1 };
enum class HashId : std::uint8_t { Sha256 = 1 };

// Prime-order subgroup of Z_p^* for a safe prime p = 2q + 1.
struct OtGroup {
  GroupId id = GroupId::Modp2048;
  mpz_class p;
  mpz_class q;  // (p - 1) / 2, the subgroup order
  mpz_class g;
  HashId hash = HashId::Sha256;

  // RFC 3526 group 14, g = 2.
  static OtGroup modp_2048();
  // 256-bit safe prime with p = 7 mod 8 so that g = 2 lies in the order-q
  // subgroup. Test scale only.
  static OtGroup test_256();
  static OtGroup from_id(GroupId id);

  // 1 < x < p and x^q = 1 (mod p).
  bool is_member(const mpz_class& x) const;
  std::size_t element_bytes() const;
};

struct OtSenderState {
  mpz_class a;
  mpz_class A;
};

struct OtReceiverState {
  std::uint32_t k_prime = 0;
  std::vector<std::uint32_t> chosen;  // sorted, 1-based positions
  std::vector<mpz_class> b;           // b[i - 1] for position i
};

struct ReceiverChoice {
  OtReceiverState state;
  std::vector<mpz_class> B;
};

struct WrappedMessage {
  Bytes ciphertext;
  Tag tag{};
};

struct ReceivedMessage {
  std::uint32_t position = 0;
  Bytes message;
};

Key sha256(std::span<const std::uint8_t> data);

// Exponent uniform in [1, q).
OtSenderState ot_sender_init(const OtGroup& group, RandomSource& rng);
OtSenderState ot_sender_from_exponent(const OtGroup& group, const mpz_class& a);

// B_i = A^{c_i} g^{b_i} mod p with c_i = 0 for chosen positions, 1 otherwise.
// Throws DomainError on duplicate or out-of-range positions, or |chosen| > k'.
ReceiverChoice ot_receiver_choose(const OtGroup& group, const mpz_class& A,
                                  std::span<const std::uint32_t> chosen, std::uint32_t k_prime,
                                  RandomSource& rng);
ReceiverChoice ot_receiver_choose_with(const OtGroup& group, const mpz_class& A,
                                       std::span<const std::uint32_t> chosen,
                                       std::uint32_t k_prime, std::span<const mpz_class> b);

// SHA-256 over the minimal big-endian encoding of a group element.
Key derive_key(const mpz_class& shared);
// Hash(B_i^a mod p)
Key sender_key(const OtGroup& group, const OtSenderState& sender, const mpz_class& B_i);
// Hash(A^{b_i} mod p)
Key receiver_key(const OtGroup& group, const mpz_class& A, const mpz_class& b_i);

// Keystream SHA-256(key || be32 counter) XORed over the message; tag is the
// first 16 bytes of SHA-256(key || 0xFF || ciphertext).
WrappedMessage wrap(const Key& key, std::span<const std::uint8_t> message);
// nullopt on tag mismatch.
std::optional<Bytes> unwrap(const Key& key, const WrappedMessage& wrapped);

// Wraps message i under Hash(B_i^a). Output order follows input order.
std::vector<WrappedMessage> ot_sender_encrypt(const OtGroup& group, const OtSenderState& sender,
                                              std::span<const mpz_class> B,
                                              std::span<const Bytes> messages);

// Recovers the chosen positions. A tag failure on a chosen position means
// the transcript is corrupt and raises ProtocolError.
std::vector<ReceivedMessage> ot_receiver_decrypt(const OtGroup& group,
                                                 const OtReceiverState& receiver,
                                                 const mpz_class& A,
                                                 std::span<const WrappedMessage> wrapped);

}  // namespace prk::ot
