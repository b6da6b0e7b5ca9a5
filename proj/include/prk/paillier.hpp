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

#include <cstddef>
#include <span>
#include <vector>

#include "prk/random.hpp"

namespace prk::he {

// Paillier public key; the generator is fixed to modulus + 1.
struct PublicKey {
  mpz_class modulus;
  mpz_class modulus_squared;
  mpz_class generator;

  static PublicKey from_modulus(const mpz_class& modulus);
  std::size_t bits() const;
};

struct SecretKey {
  mpz_class lambda;  // (p - 1)(q - 1)
  mpz_class mu;      // lambda^-1 mod modulus
  mpz_class p;
  mpz_class q;
  // CRT helpers for decryption and owner-side encryption.
  mpz_class p_squared;
  mpz_class q_squared;
  mpz_class hp;
  mpz_class hq;
  mpz_class q_inv_p;
  mpz_class q_squared_inv_p_squared;
  mpz_class exp_mod_p_squared;  // modulus mod p(p - 1)
  mpz_class exp_mod_q_squared;  // modulus mod q(q - 1)
};

struct KeyPair {
  PublicKey pub;
  SecretKey sec;
};

struct Ciphertext {
  mpz_class value;
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// keybits must be 2048 or 3072; 1024 is accepted only with test_mode set.
KeyPair keygen(unsigned keybits, RandomSource& rng, bool test_mode = false);
// Distinct primes p, q; throws DomainError when they do not form a valid key.
KeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q);

// Rejects values outside [1, modulus^2) or sharing a factor with the modulus.
void validate(const PublicKey& pk, const Ciphertext& c);

// Requires 0 <= m < modulus.
Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng);
// Same distribution as encrypt(pk, ...), using the factorization for speed.
Ciphertext encrypt(const KeyPair& keys, const mpz_class& m, RandomSource& rng);

mpz_class decrypt(const KeyPair& keys, const Ciphertext& c);
// L(c^lambda mod n^2) * mu mod n, without CRT.
mpz_class decrypt_textbook(const KeyPair& keys, const Ciphertext& c);

Ciphertext add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
// Requires 0 <= s < modulus.
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& s);

// Signed fixed-point reals in Z_modulus: x -> round(x * 2^scale_bits), with
// negatives stored as modulus - |.|. Values above modulus / 2 decode negative.
class FixedPointCodec {
 public:
  // Throws ConfigError unless max_dimension * 2^(2 * scale_bits) < modulus / 2,
  // the bound that keeps accumulated dot products from wrapping.
  FixedPointCodec(const mpz_class& modulus, unsigned scale_bits, std::size_t max_dimension);

  unsigned scale_bits() const { return scale_bits_; }
  const mpz_class& modulus() const { return modulus_; }

  // round(x * 2^scale_bits) as a signed integer.
  mpz_class encode_signed(double x) const;
  mpz_class encode(double x) const;
  double decode(const mpz_class& m, unsigned scale_bits) const;
  double decode(const mpz_class& m) const { return decode(m, scale_bits_); }
  // Decodes a sum of products of two encodings.
  double decode_product(const mpz_class& m) const { return decode(m, 2 * scale_bits_); }

 private:
  mpz_class modulus_;
  mpz_class half_;
  unsigned scale_bits_;
};

// Encrypts every coordinate of a query at the codec's scale.
std::vector<Ciphertext> encrypt_vector(const KeyPair& keys, const FixedPointCodec& codec,
                                       std::span<const double> values, RandomSource& rng);

// Evaluates Enc(sum_i encode(q_i) * encode(d_i)) against many plaintext
// documents for one encrypted query.
//
// Per-coordinate tables of c_i^1..c_i^15 are built once. Each document is
// then a 4-bit windowed multi-exponentiation that shares squarings across all
// coordinates, with positive and negative weights accumulated separately and
// joined by a single modular inverse.
class DotEvaluator {
 public:
  DotEvaluator(const PublicKey& pk, const FixedPointCodec& codec,
               std::span<const Ciphertext> encrypted_query);

  std::size_t dimension() const { return tables_.size(); }
  Ciphertext dot(std::span<const double> document) const;

 private:
  static constexpr unsigned kWindowBits = 4;
  static constexpr unsigned kTableSize = (1u << kWindowBits) - 1;

  const PublicKey* pk_;
  const FixedPointCodec* codec_;
  std::vector<std::vector<mpz_class>> tables_;
};

// One-shot form of DotEvaluator::dot. Throws DomainError on length mismatch.
Ciphertext enc_dot(const PublicKey& pk, const FixedPointCodec& codec,
                   std::span<const Ciphertext> encrypted_query, std::span<const double> document);

}  // namespace prk::he
