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

#include <cmath>
#include <cstdint>
#include <string>

#include "prk/bigint.hpp"
#include "prk/errors.hpp"

namespace prk::he {
namespace {

using bigint::invert;
using bigint::powm;

mpz_class random_unit(const mpz_class& modulus, RandomSource& rng) {
  while (true) {
    mpz_class r = bigint::random_range(1, modulus, rng);
    if (gcd(r, modulus) == 1) return r;
  }
}

mpz_class random_prime(std::size_t bits, RandomSource& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    mpz_class x = bigint::random_bits(bits, rng);
    mpz_setbit(x.get_mpz_t(), bits - 1);
    mpz_setbit(x.get_mpz_t(), bits - 2);
    mpz_class prime;
    mpz_nextprime(prime.get_mpz_t(), x.get_mpz_t());
    if (mpz_sizeinbase(prime.get_mpz_t(), 2) == bits) return prime;
  }
  throw GenerationError("prime generation failed");
}

void check_plaintext(const PublicKey& pk, const mpz_class& m) {
  if (sgn(m) < 0 || m >= pk.modulus) throw DomainError("plaintext outside [0, modulus)");
}

// L(u) = (u - 1) / d
mpz_class l_function(const mpz_class& u, const mpz_class& d) {
  mpz_class out = u - 1;
  mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), d.get_mpz_t());
  return out;
}

}  // namespace

PublicKey PublicKey::from_modulus(const mpz_class& modulus) {
  if (modulus < 15) throw DomainError("Paillier modulus too small");
  return PublicKey{modulus, modulus * modulus, modulus + 1};
}

std::size_t PublicKey::bits() const { return mpz_sizeinbase(modulus.get_mpz_t(), 2); }

KeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q) {
  if (p == q) throw DomainError("Paillier primes must be distinct");
  if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0 || mpz_probab_prime_p(q.get_mpz_t(), 30) == 0) {
    throw DomainError("Paillier factors must be prime");
  }
  const mpz_class n = p * q;
  const mpz_class phi = (p - 1) * (q - 1);
  if (gcd(n, phi) != 1) throw DomainError("gcd(n, phi(n)) != 1");

  KeyPair keys;
  keys.pub = PublicKey::from_modulus(n);
  SecretKey& sk = keys.sec;
  sk.lambda = phi;
  sk.mu = invert(phi, n);
  sk.p = p;
  sk.q = q;
  sk.p_squared = p * p;
  sk.q_squared = q * q;
  sk.hp = invert(l_function(powm(keys.pub.generator, p - 1, sk.p_squared), p), p);
  sk.hq = invert(l_function(powm(keys.pub.generator, q - 1, sk.q_squared), q), q);
  sk.q_inv_p = invert(q, p);
  sk.q_squared_inv_p_squared = invert(sk.q_squared, sk.p_squared);
  sk.exp_mod_p_squared = n % (p * (p - 1));
  sk.exp_mod_q_squared = n % (q * (q - 1));
  return keys;
}

KeyPair keygen(unsigned keybits, RandomSource& rng, bool test_mode) {
  if (keybits != 2048 && keybits != 3072 && !(keybits == 1024 && test_mode)) {
    throw DomainError("unsupported key size " + std::to_string(keybits) +
                      " (2048 or 3072; 1024 in test mode)");
  }
  for (int attempt = 0; attempt < 32; ++attempt) {
    const mpz_class p = random_prime(keybits / 2, rng);
    const mpz_class q = random_prime(keybits / 2, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != keybits) continue;
    if (gcd(n, (p - 1) * (q - 1)) != 1) continue;
    return keypair_from_primes(p, q);
  }
  throw GenerationError("Paillier key generation failed");
}

void validate(const PublicKey& pk, const Ciphertext& c) {
  if (sgn(c.value) <= 0 || c.value >= pk.modulus_squared) {
    throw ProtocolError("ciphertext outside [1, modulus^2)");
  }
  if (gcd(c.value, pk.modulus) != 1) throw ProtocolError("ciphertext not a unit mod modulus");
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng) {
  check_plaintext(pk, m);
  const mpz_class r = random_unit(pk.modulus, rng);
  // g^m = 1 + m n (mod n^2) for g = n + 1.
  mpz_class c = (1 + m * pk.modulus) % pk.modulus_squared;
  c = (c * powm(r, pk.modulus, pk.modulus_squared)) % pk.modulus_squared;
  return Ciphertext{std::move(c)};
}

Ciphertext encrypt(const KeyPair& keys, const mpz_class& m, RandomSource& rng) {
  const PublicKey& pk = keys.pub;
  const SecretKey& sk = keys.sec;
  check_plaintext(pk, m);
  const mpz_class r = random_unit(pk.modulus, rng);
  const mpz_class rp = powm(r % sk.p_squared, sk.exp_mod_p_squared, sk.p_squared);
  const mpz_class rq = powm(r % sk.q_squared, sk.exp_mod_q_squared, sk.q_squared);
  mpz_class diff = ((rp - rq) * sk.q_squared_inv_p_squared) % sk.p_squared;
  if (sgn(diff) < 0) diff += sk.p_squared;
  const mpz_class rn = rq + sk.q_squared * diff;
  mpz_class c = (1 + m * pk.modulus) % pk.modulus_squared;
  c = (c * rn) % pk.modulus_squared;
  return Ciphertext{std::move(c)};
}

mpz_class decrypt(const KeyPair& keys, const Ciphertext& c) {
  const SecretKey& sk = keys.sec;
  validate(keys.pub, c);
  const mpz_class mp =
      (l_function(powm(c.value % sk.p_squared, sk.p - 1, sk.p_squared), sk.p) * sk.hp) % sk.p;
  const mpz_class mq =
      (l_function(powm(c.value % sk.q_squared, sk.q - 1, sk.q_squared), sk.q) * sk.hq) % sk.q;
  mpz_class h = ((mp - mq) * sk.q_inv_p) % sk.p;
  if (sgn(h) < 0) h += sk.p;
  return mq + sk.q * h;
}

mpz_class decrypt_textbook(const KeyPair& keys, const Ciphertext& c) {
  validate(keys.pub, c);
  const PublicKey& pk = keys.pub;
  const mpz_class u = powm(c.value, keys.sec.lambda, pk.modulus_squared);
  return (l_function(u, pk.modulus) * keys.sec.mu) % pk.modulus;
}

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  return Ciphertext{(a.value * b.value) % pk.modulus_squared};
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& s) {
  check_plaintext(pk, s);
  return Ciphertext{powm(c.value, s, pk.modulus_squared)};
}

FixedPointCodec::FixedPointCodec(const mpz_class& modulus, unsigned scale_bits,
                                 std::size_t max_dimension)
    : modulus_(modulus), half_(modulus / 2), scale_bits_(scale_bits) {
  if (scale_bits == 0 || scale_bits > 60) throw ConfigError("scale_bits must lie in [1, 60]");
  if (max_dimension == 0) throw ConfigError("codec dimension must be positive");
  mpz_class bound = max_dimension;
  bound <<= 2 * scale_bits;
  if (bound >= half_) {
    throw ConfigError("fixed-point dot products could wrap: n * 2^(2 * scale_bits) >= modulus / 2");
  }
}

mpz_class FixedPointCodec::encode_signed(double x) const {
  if (!std::isfinite(x)) throw DomainError("cannot encode a non-finite value");
  const double scaled = std::nearbyint(std::ldexp(x, static_cast<int>(scale_bits_)));
  if (!std::isfinite(scaled)) throw DomainError("fixed-point overflow");
  mpz_class m(scaled);
  if (abs(m) >= half_) throw DomainError("fixed-point overflow");
  return m;
}

mpz_class FixedPointCodec::encode(double x) const {
  mpz_class m = encode_signed(x);
  if (sgn(m) < 0) m += modulus_;
  return m;
}

double FixedPointCodec::decode(const mpz_class& m, unsigned scale_bits) const {
  if (sgn(m) < 0 || m >= modulus_) throw DomainError("encoded value outside [0, modulus)");
  const mpz_class signed_value = m > half_ ? mpz_class(m - modulus_) : m;
  return std::ldexp(signed_value.get_d(), -static_cast<int>(scale_bits));
}

std::vector<Ciphertext> encrypt_vector(const KeyPair& keys, const FixedPointCodec& codec,
                                       std::span<const double> values, RandomSource& rng) {
  std::vector<Ciphertext> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(encrypt(keys, codec.encode(v), rng));
  return out;
}

DotEvaluator::DotEvaluator(const PublicKey& pk, const FixedPointCodec& codec,
                           std::span<const Ciphertext> encrypted_query)
    : pk_(&pk), codec_(&codec) {
  if (codec.modulus() != pk.modulus) throw DomainError("codec and key moduli differ");
  tables_.reserve(encrypted_query.size());
  for (const Ciphertext& c : encrypted_query) {
    validate(pk, c);
    std::vector<mpz_class> table(kTableSize);
    table[0] = c.value;
    for (unsigned d = 1; d < kTableSize; ++d) {
      table[d] = (table[d - 1] * c.value) % pk.modulus_squared;
    }
    tables_.push_back(std::move(table));
  }
}

Ciphertext DotEvaluator::dot(std::span<const double> document) const {
  if (document.size() != tables_.size()) {
    throw DomainError("enc_dot length mismatch: " + std::to_string(document.size()) + " vs " +
                      std::to_string(tables_.size()));
  }
  const std::size_t n = document.size();
  const int scale = static_cast<int>(codec_->scale_bits());
  std::vector<std::uint64_t> magnitude(n);
  std::vector<bool> negative(n);
  std::uint64_t widest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(document[i])) throw DomainError("non-finite document coordinate");
    const double scaled = std::nearbyint(std::ldexp(document[i], scale));
    if (std::abs(scaled) >= 0x1.0p62) throw DomainError("document coordinate too large");
    const auto s = static_cast<std::int64_t>(scaled);
    negative[i] = s < 0;
    magnitude[i] = static_cast<std::uint64_t>(s < 0 ? -s : s);
    widest |= magnitude[i];
  }
  unsigned bit_length = 0;
  while (bit_length < 64 && (widest >> bit_length) != 0) ++bit_length;
  const unsigned windows = (bit_length + kWindowBits - 1) / kWindowBits;

  const mpz_srcptr mod = pk_->modulus_squared.get_mpz_t();
  mpz_class acc[2] = {1, 1};
  bool started[2] = {false, false};
  mpz_class tmp;
  for (unsigned w = windows; w-- > 0;) {
    for (int sign = 0; sign < 2; ++sign) {
      if (!started[sign]) continue;
      for (unsigned b = 0; b < kWindowBits; ++b) {
        mpz_mul(tmp.get_mpz_t(), acc[sign].get_mpz_t(), acc[sign].get_mpz_t());
        mpz_tdiv_r(acc[sign].get_mpz_t(), tmp.get_mpz_t(), mod);
      }
    }
    const unsigned shift = w * kWindowBits;
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned digit = static_cast<unsigned>((magnitude[i] >> shift) & kTableSize);
      if (digit == 0) continue;
      const int sign = negative[i] ? 1 : 0;
      if (!started[sign]) {
        acc[sign] = tables_[i][digit - 1];
        started[sign] = true;
        continue;
      }
      mpz_mul(tmp.get_mpz_t(), acc[sign].get_mpz_t(), tables_[i][digit - 1].get_mpz_t());
      mpz_tdiv_r(acc[sign].get_mpz_t(), tmp.get_mpz_t(), mod);
    }
  }
  if (started[1]) {
    acc[0] = (acc[0] * invert(acc[1], pk_->modulus_squared)) % pk_->modulus_squared;
  }
  return Ciphertext{std::move(acc[0])};
}

Ciphertext enc_dot(const PublicKey& pk, const FixedPointCodec& codec,
                   std::span<const Ciphertext> encrypted_query, std::span<const double> document) {
  if (encrypted_query.size() != document.size()) throw DomainError("enc_dot length mismatch");
  return DotEvaluator(pk, codec, encrypted_query).dot(document);
}

}  // namespace prk::he
