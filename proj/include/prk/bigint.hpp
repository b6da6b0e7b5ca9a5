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
#include <span>
#include <string>
#include <vector>

#include "prk/random.hpp"

namespace prk::bigint {

// Big-endian magnitude with no leading zero bytes; zero encodes as empty.
std::vector<std::uint8_t> to_bytes(const mpz_class& value);
mpz_class from_bytes(std::span<const std::uint8_t> bytes);

std::string to_hex(const mpz_class& value);
mpz_class from_hex(const std::string& hex);

// Uniform integer with exactly `bits` random bits (top bit not forced).
mpz_class random_bits(std::size_t bits, RandomSource& rng);
// Uniform in [0, bound). bound must be positive.
mpz_class random_below(const mpz_class& bound, RandomSource& rng);
// Uniform in [lo, hi).
mpz_class random_range(const mpz_class& lo, const mpz_class& hi, RandomSource& rng);

mpz_class powm(const mpz_class& base, const mpz_class& exponent, const mpz_class& modulus);
// Throws DomainError when the inverse does not exist.
mpz_class invert(const mpz_class& value, const mpz_class& modulus);

}  // namespace prk::bigint
