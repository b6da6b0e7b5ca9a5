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

#include "prk/oblivious_transfer.hpp"

#include <openssl/bn.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

#include "prk/bigint.hpp"
#include "prk/errors.hpp"

namespace prk::ot {
namespace {

constexpr const char* kTest256Prime =
    "e27f4c79fc5aac128490e9d83bb72f987d141ca9eab8e647db3d169553cf3407";

OtGroup make_group(GroupId id, const mpz_class& p) {
  OtGroup group;
  group.id = id;
  group.p = p;
  group.q = (p - 1) / 2;
  group.g = 2;
  return group;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 init failed");
    }
  }
  Sha256& update(std::span<const std::uint8_t> data) {
    if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) {
      throw std::runtime_error("SHA-256 update failed");
    }
    return *this;
  }
  Key finish() {
    Key out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size()) {
      throw std::runtime_error("SHA-256 final failed");
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::array<std::uint8_t, 4> be32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
          static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

Tag compute_tag(const Key& key, std::span<const std::uint8_t> ciphertext) {
  const std::uint8_t marker = 0xFF;
  const Key digest =
      Sha256().update(key).update(std::span<const std::uint8_t>(&marker, 1)).update(ciphertext).finish();
  Tag tag{};
  std::copy_n(digest.begin(), tag.size(), tag.begin());
  return tag;
}

Bytes apply_keystream(const Key& key, std::span<const std::uint8_t> input) {
  Bytes out(input.begin(), input.end());
  for (std::size_t offset = 0, block = 0; offset < out.size(); offset += 32, ++block) {
    const Key stream = Sha256().update(key).update(be32(static_cast<std::uint32_t>(block))).finish();
    const std::size_t take = std::min<std::size_t>(32, out.size() - offset);
    for (std::size_t j = 0; j < take; ++j) out[offset + j] ^= stream[j];
  }
  return out;
}

}  // namespace

OtGroup OtGroup::modp_2048() {
  std::unique_ptr<BIGNUM, decltype(&BN_free)> bn(BN_get_rfc3526_prime_2048(nullptr), &BN_free);
  if (!bn) throw std::runtime_error("RFC 3526 prime unavailable");
  std::unique_ptr<char, void (*)(char*)> hex(BN_bn2hex(bn.get()),
                                             [](char* s) { OPENSSL_free(s); });
  return make_group(GroupId::Modp2048, bigint::from_hex(hex.get()));
}

OtGroup OtGroup::test_256() { return make_group(GroupId::Test256, bigint::from_hex(kTest256Prime)); }

OtGroup OtGroup::from_id(GroupId id) {
  switch (id) {
    case GroupId::Modp2048:
      return modp_2048();
    case GroupId::Test256:
      return test_256();
  }
  throw DomainError("unknown OT group id");
}

bool OtGroup::is_member(const mpz_class& x) const {
  if (x <= 1 || x >= p) return false;
  return bigint::powm(x, q, p) == 1;
}

std::size_t OtGroup::element_bytes() const { return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8; }

Key sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }

OtSenderState ot_sender_init(const OtGroup& group, RandomSource& rng) {
  return ot_sender_from_exponent(group, bigint::random_range(1, group.q, rng));
}

OtSenderState ot_sender_from_exponent(const OtGroup& group, const mpz_class& a) {
  if (a < 1) throw DomainError("OT exponent must be positive");
  return OtSenderState{a, bigint::powm(group.g, a, group.p)};
}

ReceiverChoice ot_receiver_choose(const OtGroup& group, const mpz_class& A,
                                  std::span<const std::uint32_t> chosen, std::uint32_t k_prime,
                                  RandomSource& rng) {
  std::vector<mpz_class> b;
  b.reserve(k_prime);
  for (std::uint32_t i = 0; i < k_prime; ++i) b.push_back(bigint::random_range(1, group.q, rng));
  return ot_receiver_choose_with(group, A, chosen, k_prime, b);
}

ReceiverChoice ot_receiver_choose_with(const OtGroup& group, const mpz_class& A,
                                       std::span<const std::uint32_t> chosen,
                                       std::uint32_t k_prime, std::span<const mpz_class> b) {
  if (b.size() != k_prime) throw DomainError("need one blinding exponent per position");
  if (chosen.size() > k_prime) throw DomainError("more chosen positions than messages");
  if (A <= 1 || A >= group.p) throw ProtocolError("sender value A outside (1, p)");

  std::vector<std::uint32_t> sorted(chosen.begin(), chosen.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("duplicate chosen position");
  }
  if (!sorted.empty() && (sorted.front() < 1 || sorted.back() > k_prime)) {
    throw DomainError("chosen position outside [1, k']");
  }

  ReceiverChoice out;
  out.state.k_prime = k_prime;
  out.state.chosen = sorted;
  out.state.b.assign(b.begin(), b.end());
  out.B.reserve(k_prime);
  for (std::uint32_t i = 1; i <= k_prime; ++i) {
    mpz_class B = bigint::powm(group.g, b[i - 1], group.p);
    if (!std::binary_search(sorted.begin(), sorted.end(), i)) B = (B * A) % group.p;
    out.B.push_back(std::move(B));
  }
  return out;
}

Key derive_key(const mpz_class& shared) { return sha256(bigint::to_bytes(shared)); }

Key sender_key(const OtGroup& group, const OtSenderState& sender, const mpz_class& B_i) {
  return derive_key(bigint::powm(B_i, sender.a, group.p));
}

Key receiver_key(const OtGroup& group, const mpz_class& A, const mpz_class& b_i) {
  return derive_key(bigint::powm(A, b_i, group.p));
}

WrappedMessage wrap(const Key& key, std::span<const std::uint8_t> message) {
  WrappedMessage out;
  out.ciphertext = apply_keystream(key, message);
  out.tag = compute_tag(key, out.ciphertext);
  return out;
}

std::optional<Bytes> unwrap(const Key& key, const WrappedMessage& wrapped) {
  const Tag expected = compute_tag(key, wrapped.ciphertext);
  if (CRYPTO_memcmp(expected.data(), wrapped.tag.data(), expected.size()) != 0) {
    return std::nullopt;
  }
  return apply_keystream(key, wrapped.ciphertext);
}

std::vector<WrappedMessage> ot_sender_encrypt(const OtGroup& group, const OtSenderState& sender,
                                              std::span<const mpz_class> B,
                                              std::span<const Bytes> messages) {
  if (B.size() != messages.size()) {
    throw DomainError("OT length mismatch: " + std::to_string(B.size()) + " blinded values for " +
                      std::to_string(messages.size()) + " messages");
  }
  std::vector<WrappedMessage> out;
  out.reserve(messages.size());
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (B[i] <= 1 || B[i] >= group.p) throw ProtocolError("OT value B outside (1, p)");
    out.push_back(wrap(sender_key(group, sender, B[i]), messages[i]));
  }
  return out;
}

std::vector<ReceivedMessage> ot_receiver_decrypt(const OtGroup& group,
                                                 const OtReceiverState& receiver,
                                                 const mpz_class& A,
                                                 std::span<const WrappedMessage> wrapped) {
  if (wrapped.size() != receiver.k_prime) throw ProtocolError("OT reply has the wrong length");
  std::vector<ReceivedMessage> out;
  out.reserve(receiver.chosen.size());
  for (std::uint32_t position : receiver.chosen) {
    const Key key = receiver_key(group, A, receiver.b[position - 1]);
    auto plain = unwrap(key, wrapped[position - 1]);
    if (!plain) {
      throw ProtocolError("OT verification tag failed on chosen position " +
                          std::to_string(position));
    }
    out.push_back(ReceivedMessage{position, std::move(*plain)});
  }
  return out;
}

}  // namespace prk::ot
