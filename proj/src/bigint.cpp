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

#include "prk/bigint.hpp"

#include "prk/errors.hpp"

namespace prk::bigint {

std::vector<std::uint8_t> to_bytes(const mpz_class& value) {
  if (sgn(value) < 0) throw DomainError("cannot serialize a negative integer");
  if (value == 0) return {};
  std::vector<std::uint8_t> out((mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class from_bytes(std::span<const std::uint8_t> bytes) {
  mpz_class value;
  if (!bytes.empty()) mpz_import(value.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return value;
}

std::string to_hex(const mpz_class& value) { return value.get_str(16); }

mpz_class from_hex(const std::string& hex) {
  mpz_class value;
  if (hex.empty() || value.set_str(hex, 16) != 0) throw DomainError("invalid hex integer");
  return value;
}

mpz_class random_bits(std::size_t bits, RandomSource& rng) {
  std::vector<std::uint8_t> buf((bits + 7) / 8);
  rng.fill(buf);
  if (const std::size_t extra = buf.size() * 8 - bits; extra > 0 && !buf.empty()) {
    buf[0] &= static_cast<std::uint8_t>(0xFF >> extra);
  }
  return from_bytes(buf);
}

mpz_class random_below(const mpz_class& bound, RandomSource& rng) {
  if (sgn(bound) <= 0) throw DomainError("random bound must be positive");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  while (true) {
    mpz_class candidate = random_bits(bits, rng);
    if (candidate < bound) return candidate;
  }
}

mpz_class random_range(const mpz_class& lo, const mpz_class& hi, RandomSource& rng) {
  if (hi <= lo) throw DomainError("empty random range");
  return lo + random_below(hi - lo, rng);
}

mpz_class powm(const mpz_class& base, const mpz_class& exponent, const mpz_class& modulus) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return out;
}

mpz_class invert(const mpz_class& value, const mpz_class& modulus) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t()) == 0) {
    throw DomainError("value is not invertible");
  }
  return out;
}

}  // namespace prk::bigint
