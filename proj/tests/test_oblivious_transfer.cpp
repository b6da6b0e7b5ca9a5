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

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <set>

#include "prk/bigint.hpp"
#include "prk/errors.hpp"

namespace {

using namespace prk;
using namespace prk::ot;

OtGroup toy_group() {
  OtGroup g;
  g.id = GroupId::Test256;
  g.p = 23;
  g.q = 11;
  g.g = 5;
  return g;
}

Bytes random_message(RandomSource& rng, std::size_t max_len) {
  Bytes m(rng() % (max_len + 1));
  rng.fill(m);
  return m;
}

TEST(OtGroup, StandardGroups) {
  for (const OtGroup& g : {OtGroup::modp_2048(), OtGroup::test_256()}) {
    EXPECT_NE(mpz_probab_prime_p(g.p.get_mpz_t(), 30), 0);
    EXPECT_NE(mpz_probab_prime_p(g.q.get_mpz_t(), 30), 0);
    EXPECT_EQ(g.p, 2 * g.q + 1);
    EXPECT_TRUE(g.is_member(g.g));
  }
  EXPECT_EQ(OtGroup::modp_2048().element_bytes(), 256u);
  EXPECT_EQ(OtGroup::test_256().element_bytes(), 32u);
  EXPECT_EQ(OtGroup::from_id(GroupId::Test256).p, OtGroup::test_256().p);
}

TEST(OtSender, ToyExample) {
  const OtSenderState s = ot_sender_from_exponent(toy_group(), 3);
  EXPECT_EQ(s.A, 10);
}

TEST(OtSender, RangeAndFreshness) {
  RandomSource rng(1);
  const OtGroup g = OtGroup::test_256();
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    const OtSenderState s = ot_sender_init(g, rng);
    EXPECT_GT(s.A, 1);
    EXPECT_LT(s.A, g.p);
    EXPECT_GE(s.a, 1);
    EXPECT_LT(s.a, g.q);
    seen.insert(s.A.get_str(16));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(OtReceiver, ToyBlinding) {
  const std::vector<mpz_class> b{2};
  const std::vector<std::uint32_t> chosen{1}, none{};
  EXPECT_EQ(ot_receiver_choose_with(toy_group(), 10, chosen, 1, b).B[0], 2);
  EXPECT_EQ(ot_receiver_choose_with(toy_group(), 10, none, 1, b).B[0], 20);
}

TEST(OtReceiver, RejectsBadPositions) {
  RandomSource rng(2);
  const OtGroup g = OtGroup::test_256();
  const mpz_class A = ot_sender_init(g, rng).A;
  const std::vector<std::uint32_t> dup{1, 1}, zero{0}, high{5};
  EXPECT_THROW(ot_receiver_choose(g, A, dup, 4, rng), DomainError);
  EXPECT_THROW(ot_receiver_choose(g, A, zero, 4, rng), DomainError);
  EXPECT_THROW(ot_receiver_choose(g, A, high, 4, rng), DomainError);
  const std::vector<std::uint32_t> ok{1};
  EXPECT_THROW(ot_receiver_choose(g, 1, ok, 4, rng), ProtocolError);
}

TEST(OtKeys, ChosenAgreeUnchosenDiffer) {
  RandomSource rng(3);
  const OtGroup g = OtGroup::test_256();
  const OtSenderState s = ot_sender_init(g, rng);
  const std::vector<std::uint32_t> chosen{2};
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, chosen, 3, rng);
  EXPECT_EQ(sender_key(g, s, rc.B[1]), receiver_key(g, s.A, rc.state.b[1]));
  EXPECT_NE(sender_key(g, s, rc.B[0]), receiver_key(g, s.A, rc.state.b[0]));
  // Unchosen: sender hashes g^{a(a + b)}.
  const mpz_class expected = bigint::powm(g.g, s.a * (s.a + rc.state.b[0]), g.p);
  EXPECT_EQ(sender_key(g, s, rc.B[0]), derive_key(expected));
}

TEST(Wrap, RoundTripAndTamper) {
  RandomSource rng(4);
  Key key;
  rng.fill(key);
  Bytes msg(1024);
  rng.fill(msg);
  WrappedMessage w = wrap(key, msg);
  EXPECT_EQ(unwrap(key, w), msg);
  EXPECT_NE(w.ciphertext, msg);
  Key other = key;
  other[0] ^= 1;
  EXPECT_FALSE(unwrap(other, w).has_value());
  w.ciphertext[10] ^= 0x80;
  EXPECT_FALSE(unwrap(key, w).has_value());
  EXPECT_EQ(unwrap(key, wrap(key, Bytes{})), Bytes{});
}

TEST(Wrap, KeystreamAndTagLayout) {
  Key key{};
  const Bytes msg(40, 0);
  const WrappedMessage w = wrap(key, msg);
  for (std::uint8_t counter : {0, 1}) {
    Bytes block(key.begin(), key.end());
    block.insert(block.end(), {0, 0, 0, counter});
    const Key stream = sha256(block);
    const std::size_t len = counter == 0 ? 32 : 8;
    EXPECT_TRUE(std::equal(stream.begin(), stream.begin() + len, w.ciphertext.begin() + 32 * counter));
  }
  Bytes tag_input(key.begin(), key.end());
  tag_input.push_back(0xFF);
  tag_input.insert(tag_input.end(), w.ciphertext.begin(), w.ciphertext.end());
  const Key full = sha256(tag_input);
  EXPECT_TRUE(std::equal(w.tag.begin(), w.tag.end(), full.begin()));
}

TEST(Ot, OneOfTwo) {
  RandomSource rng(5);
  const OtGroup g = OtGroup::test_256();
  const OtSenderState s = ot_sender_init(g, rng);
  const std::vector<std::uint32_t> chosen{2};
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, chosen, 2, rng);
  const std::vector<Bytes> msgs{Bytes{'o', 'n', 'e'}, Bytes{'t', 'w', 'o'}};
  const auto wrapped = ot_sender_encrypt(g, s, rc.B, msgs);
  const auto got = ot_receiver_decrypt(g, rc.state, s.A, wrapped);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].position, 2u);
  EXPECT_EQ(got[0].message, msgs[1]);
  EXPECT_FALSE(unwrap(receiver_key(g, s.A, rc.state.b[0]), wrapped[0]).has_value());
}

TEST(Ot, EmptyChoiceAndLengthMismatch) {
  RandomSource rng(6);
  const OtGroup g = OtGroup::test_256();
  const OtSenderState s = ot_sender_init(g, rng);
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, {}, 3, rng);
  const std::vector<Bytes> msgs(3, Bytes{1, 2, 3});
  EXPECT_TRUE(ot_receiver_decrypt(g, rc.state, s.A, ot_sender_encrypt(g, s, rc.B, msgs)).empty());
  EXPECT_THROW(ot_sender_encrypt(g, s, rc.B, std::vector<Bytes>(2)), DomainError);
}

// Semi-honest trust: a receiver setting c_i = 0 everywhere opens every message.
TEST(Ot, CheatingReceiverOpensEverything) {
  RandomSource rng(7);
  const OtGroup g = OtGroup::test_256();
  const OtSenderState s = ot_sender_init(g, rng);
  const std::vector<std::uint32_t> all{1, 2, 3, 4};
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, all, 4, rng);
  std::vector<Bytes> msgs;
  for (int i = 0; i < 4; ++i) msgs.push_back(random_message(rng, 50));
  const auto got = ot_receiver_decrypt(g, rc.state, s.A, ot_sender_encrypt(g, s, rc.B, msgs));
  ASSERT_EQ(got.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(got[i].message, msgs[i]);
}

TEST(Ot, CorruptedChosenMessageIsProtocolError) {
  RandomSource rng(8);
  const OtGroup g = OtGroup::test_256();
  const OtSenderState s = ot_sender_init(g, rng);
  const std::vector<std::uint32_t> chosen{1};
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, chosen, 2, rng);
  auto wrapped = ot_sender_encrypt(g, s, rc.B, std::vector<Bytes>{Bytes{9}, Bytes{8}});
  wrapped[0].tag[0] ^= 1;
  EXPECT_THROW(ot_receiver_decrypt(g, rc.state, s.A, wrapped), ProtocolError);
}

TEST(Ot, RandomizedSessions) {
  RandomSource rng(9);
  const OtGroup g = OtGroup::test_256();
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t kp = 1 + static_cast<std::uint32_t>(rng() % 64);
    const std::uint32_t k = static_cast<std::uint32_t>(rng() % (kp + 1));
    std::vector<std::uint32_t> all(kp);
    std::iota(all.begin(), all.end(), 1u);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::uint32_t> chosen(all.begin(), all.begin() + k);
    std::vector<Bytes> msgs;
    for (std::uint32_t i = 0; i < kp; ++i) msgs.push_back(random_message(rng, 200));
    const OtSenderState s = ot_sender_init(g, rng);
    const ReceiverChoice rc = ot_receiver_choose(g, s.A, chosen, kp, rng);
    const auto wrapped = ot_sender_encrypt(g, s, rc.B, msgs);
    const auto got = ot_receiver_decrypt(g, rc.state, s.A, wrapped);
    ASSERT_EQ(got.size(), k);
    std::set<std::uint32_t> picked(chosen.begin(), chosen.end());
    for (const auto& r : got) EXPECT_EQ(r.message, msgs[r.position - 1]);
    for (std::uint32_t i = 1; i <= kp; ++i) {
      if (picked.contains(i)) continue;
      EXPECT_FALSE(unwrap(receiver_key(g, s.A, rc.state.b[i - 1]), wrapped[i - 1]).has_value());
    }
  }
}

TEST(Ot, ModpGroupSession) {
  RandomSource rng(10);
  const OtGroup g = OtGroup::modp_2048();
  const OtSenderState s = ot_sender_init(g, rng);
  std::vector<std::uint32_t> chosen{3, 17, 50, 99, 160};
  std::vector<Bytes> msgs;
  for (int i = 0; i < 160; ++i) msgs.push_back(random_message(rng, 64));
  const ReceiverChoice rc = ot_receiver_choose(g, s.A, chosen, 160, rng);
  const auto got = ot_receiver_decrypt(g, rc.state, s.A, ot_sender_encrypt(g, s, rc.B, msgs));
  ASSERT_EQ(got.size(), 5u);
  for (const auto& r : got) EXPECT_EQ(r.message, msgs[r.position - 1]);
}

// B for chosen (c = 0) and unchosen (c = 1) positions: homogeneity chi-square
// over 64 buckets of the low bits.
TEST(Ot, BlindingValuesIndistinguishable) {
  RandomSource rng(11);
  const OtGroup g = OtGroup::test_256();
  const mpz_class A = ot_sender_init(g, rng).A;
  std::vector<double> c0(64, 0.0), c1(64, 0.0);
  const std::vector<std::uint32_t> first{1};
  for (int i = 0; i < 10000; ++i) {
    const ReceiverChoice rc = ot_receiver_choose(g, A, first, 2, rng);
    c0[mpz_class(rc.B[0] % 64).get_ui()] += 1;
    c1[mpz_class(rc.B[1] % 64).get_ui()] += 1;
  }
  double stat = 0.0;
  for (int b = 0; b < 64; ++b) {
    const double total = c0[b] + c1[b];
    if (total == 0) continue;
    const double e = total / 2;
    stat += (c0[b] - e) * (c0[b] - e) / e + (c1[b] - e) * (c1[b] - e) / e;
  }
  const boost::math::chi_squared_distribution<double> chi(63);
  EXPECT_GT(boost::math::cdf(boost::math::complement(chi, stat)), 0.01);
}

}  // namespace
