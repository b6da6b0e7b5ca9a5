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

#include "prk/paillier.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prk/bigint.hpp"
#include "prk/errors.hpp"
#include "test_support.hpp"

namespace {

using namespace prk;
using namespace prk::he;

const KeyPair& keys() { return *prk::testing::test_keys(); }

TEST(Keygen, TestModeRoundTripsZero) {
  RandomSource rng(1);
  EXPECT_EQ(decrypt(keys(), encrypt(keys().pub, 0, rng)), 0);
  EXPECT_GE(keys().pub.bits(), 1023u);
}

TEST(Keygen, SizePolicy) {
  RandomSource rng(2);
  EXPECT_THROW(keygen(1024, rng, false), DomainError);
  EXPECT_THROW(keygen(512, rng, true), DomainError);
  EXPECT_THROW(keygen(4096, rng, false), DomainError);
}

TEST(Keygen, Key2048PlaintextEdge) {
  RandomSource rng(3);
  const KeyPair k = keygen(2048, rng);
  EXPECT_EQ(k.pub.bits(), 2048u);
  EXPECT_NE(k.sec.p, k.sec.q);
  EXPECT_EQ(mpz_sizeinbase(k.sec.p.get_mpz_t(), 2), mpz_sizeinbase(k.sec.q.get_mpz_t(), 2));
  const mpz_class top = k.pub.modulus - 1;
  EXPECT_EQ(decrypt(k, encrypt(k.pub, top, rng)), top);
  EXPECT_EQ(decrypt(k, encrypt(k, top, rng)), top);
}

TEST(Keygen, KeypairFromPrimesValidates) {
  EXPECT_THROW(keypair_from_primes(101, 101), DomainError);
  EXPECT_THROW(keypair_from_primes(15, 101), DomainError);
  const KeyPair small = keypair_from_primes(1000003, 1000033);
  RandomSource rng(4);
  EXPECT_EQ(decrypt(small, encrypt(small.pub, 123456789, rng)), 123456789);
}

TEST(Encrypt, RandomRoundTrips) {
  RandomSource rng(5);
  for (int i = 0; i < 100; ++i) {
    const mpz_class m = bigint::random_below(keys().pub.modulus, rng);
    EXPECT_EQ(decrypt(keys(), encrypt(keys().pub, m, rng)), m);
    EXPECT_EQ(decrypt(keys(), encrypt(keys(), m, rng)), m);
    EXPECT_EQ(decrypt_textbook(keys(), encrypt(keys(), m, rng)), m);
  }
}

TEST(Encrypt, SmallValuesAndRange) {
  RandomSource rng(6);
  EXPECT_EQ(decrypt(keys(), encrypt(keys().pub, 5, rng)), 5);
  EXPECT_THROW(encrypt(keys().pub, -1, rng), DomainError);
  EXPECT_THROW(encrypt(keys().pub, keys().pub.modulus, rng), DomainError);
}

TEST(Encrypt, Probabilistic) {
  RandomSource rng(7);
  EXPECT_NE(encrypt(keys().pub, 42, rng), encrypt(keys().pub, 42, rng));
}

TEST(Validate, RejectsOutOfRangeCiphertexts) {
  EXPECT_THROW(validate(keys().pub, Ciphertext{0}), ProtocolError);
  EXPECT_THROW(validate(keys().pub, Ciphertext{keys().pub.modulus_squared}), ProtocolError);
  EXPECT_THROW(validate(keys().pub, Ciphertext{keys().sec.p}), ProtocolError);
}

TEST(Homomorphism, AddAndScalar) {
  RandomSource rng(8);
  const auto& pk = keys().pub;
  EXPECT_EQ(decrypt(keys(), add(pk, encrypt(pk, 2, rng), encrypt(pk, 3, rng))), 5);
  EXPECT_EQ(decrypt(keys(), scalar_mul(pk, encrypt(pk, 7, rng), 0)), 0);
  for (int i = 0; i < 50; ++i) {
    const mpz_class a = bigint::random_below(pk.modulus, rng);
    const mpz_class b = bigint::random_below(pk.modulus, rng);
    const mpz_class s = bigint::random_below(pk.modulus, rng);
    mpz_class sum = (a + b) % pk.modulus;
    mpz_class prod = (a * s) % pk.modulus;
    EXPECT_EQ(decrypt(keys(), add(pk, encrypt(pk, a, rng), encrypt(pk, b, rng))), sum);
    EXPECT_EQ(decrypt(keys(), scalar_mul(pk, encrypt(pk, a, rng), s)), prod);
  }
  EXPECT_THROW(scalar_mul(pk, encrypt(pk, 1, rng), pk.modulus), DomainError);
}

TEST(FixedPoint, Encoding) {
  const auto& n = keys().pub.modulus;
  const FixedPointCodec c4(n, 4, 768);
  EXPECT_EQ(c4.encode(0.0), 0);
  EXPECT_EQ(c4.encode(1.5), 24);
  EXPECT_EQ(c4.encode(-1.0), n - 16);
  const FixedPointCodec c(n, 40, 768);
  EXPECT_EQ(c.encode(-1.0), n - (mpz_class(1) << 40));
  EXPECT_DOUBLE_EQ(c.decode(c.encode(-1.0)), -1.0);
  RandomSource rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform01() - 0.5) * 1e6;
    EXPECT_LE(std::abs(c.decode(c.encode(x)) - x), std::ldexp(1.0, -41) + 1e-16 * std::abs(x));
  }
}

TEST(FixedPoint, OverflowAndCapacity) {
  const auto& n = keys().pub.modulus;
  const FixedPointCodec c(n, 40, 768);
  EXPECT_THROW(c.encode(std::ldexp(1.0, 1000)), DomainError);
  EXPECT_THROW(c.encode(NAN), DomainError);
  EXPECT_THROW(FixedPointCodec(n, 600, 768), ConfigError);
  EXPECT_THROW(FixedPointCodec(mpz_class(1) << 80, 40, 768), ConfigError);
}

std::vector<double> scaled(const std::vector<double>& v, const FixedPointCodec& c) {
  std::vector<double> out;
  for (double x : v) out.push_back(c.encode_signed(x).get_d());
  return out;
}

mpz_class integer_dot(const std::vector<double>& q, const std::vector<double>& d,
                      const FixedPointCodec& c) {
  mpz_class acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += c.encode_signed(q[i]) * c.encode_signed(d[i]);
  mpz_class r = acc % c.modulus();
  if (r < 0) r += c.modulus();
  return r;
}

TEST(EncDot, SelfAndOrthogonal) {
  RandomSource rng(10);
  const int n = 64;
  const FixedPointCodec codec(keys().pub.modulus, 40, n);
  const auto q = prk::testing::random_unit(n, rng);
  auto o = prk::testing::random_unit(n, rng);
  const double proj = dot(o, q);
  for (int i = 0; i < n; ++i) o[i] -= proj * q[i];
  const auto enc = encrypt_vector(keys(), codec, q, rng);
  EXPECT_NEAR(codec.decode_product(decrypt(keys(), enc_dot(keys().pub, codec, enc, q))), 1.0,
              std::ldexp(1.0, -30));
  EXPECT_NEAR(codec.decode_product(decrypt(keys(), enc_dot(keys().pub, codec, enc, o))), 0.0,
              std::ldexp(1.0, -30));
  EXPECT_THROW(enc_dot(keys().pub, codec, enc, std::vector<double>(n + 1, 0.0)), DomainError);
}

TEST(EncDot, ExactIntegerInnerProduct) {
  RandomSource rng(11);
  const int n = 200;
  const FixedPointCodec codec(keys().pub.modulus, 40, n);
  for (int t = 0; t < 20; ++t) {
    const auto q = prk::testing::random_unit(n, rng);
    const auto enc = encrypt_vector(keys(), codec, q, rng);
    const DotEvaluator eval(keys().pub, codec, enc);
    for (int j = 0; j < 5; ++j) {
      const auto d = prk::testing::random_unit(n, rng);
      const mpz_class got = decrypt(keys(), eval.dot(d));
      EXPECT_EQ(got, integer_dot(q, d, codec));
      EXPECT_NEAR(codec.decode_product(got), dot(q, d), n * std::ldexp(1.0, -40));
    }
  }
}

TEST(EncDot, EvaluatorMatchesNaiveScalarProducts) {
  RandomSource rng(12);
  const int n = 12;
  const FixedPointCodec codec(keys().pub.modulus, 40, n);
  const auto q = prk::testing::random_unit(n, rng);
  const auto d = prk::testing::random_unit(n, rng);
  const auto enc = encrypt_vector(keys(), codec, q, rng);
  Ciphertext acc = encrypt(keys().pub, 0, rng);
  for (int i = 0; i < n; ++i) {
    acc = add(keys().pub, acc, scalar_mul(keys().pub, enc[i], codec.encode(d[i])));
  }
  EXPECT_EQ(decrypt(keys(), acc), decrypt(keys(), enc_dot(keys().pub, codec, enc, d)));
}

TEST(EncDot, RankingPreserved) {
  RandomSource rng(13);
  const int n = 32;
  const FixedPointCodec codec(keys().pub.modulus, 40, n);
  for (int t = 0; t < 10; ++t) {
    const auto q = prk::testing::random_unit(n, rng);
    const auto enc = encrypt_vector(keys(), codec, q, rng);
    const DotEvaluator eval(keys().pub, codec, enc);
    std::vector<std::vector<double>> docs;
    std::vector<double> plain, decrypted;
    for (int j = 0; j < 30; ++j) {
      docs.push_back(prk::testing::random_unit(n, rng));
      plain.push_back(cosine_distance(q, docs.back()));
      decrypted.push_back(1.0 - codec.decode_product(decrypt(keys(), eval.dot(docs.back()))));
    }
    std::vector<int> a(30), b(30);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    std::stable_sort(a.begin(), a.end(), [&](int x, int y) { return plain[x] < plain[y]; });
    std::stable_sort(b.begin(), b.end(), [&](int x, int y) { return decrypted[x] < decrypted[y]; });
    EXPECT_EQ(a, b);
  }
}

TEST(EncDot, RejectsBadCiphertexts) {
  RandomSource rng(14);
  const FixedPointCodec codec(keys().pub.modulus, 40, 4);
  std::vector<Ciphertext> enc = encrypt_vector(keys(), codec, std::vector<double>{0.5, 0.5, 0.5, 0.5}, rng);
  enc[2] = Ciphertext{keys().pub.modulus_squared + 1};
  EXPECT_THROW(DotEvaluator(keys().pub, codec, enc), ProtocolError);
}

}  // namespace
