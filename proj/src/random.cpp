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

#include "prk/random.hpp"

#include <openssl/rand.h>

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace prk {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomSource RandomSource::from_os() { return RandomSource(); }

RandomSource RandomSource::from_env(const char* var) {
  if (const char* value = std::getenv(var); value != nullptr && *value != '\0') {
    return RandomSource(std::stoull(value, nullptr, 0));
  }
  return from_os();
}

RandomSource::result_type RandomSource::operator()() {
  if (seed_) return engine_();
  if (pool_pos_ == pool_.size()) {
    if (RAND_bytes(reinterpret_cast<unsigned char*>(pool_.data()),
                   static_cast<int>(sizeof(pool_))) != 1) {
      throw std::runtime_error("RAND_bytes failed");
    }
    pool_pos_ = 0;
  }
  return pool_[pool_pos_++];
}

double RandomSource::uniform01() {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::normal() { return normal_(*this); }

void RandomSource::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    const std::uint64_t word = (*this)();
    const std::size_t take = std::min<std::size_t>(8, out.size() - i);
    std::memcpy(out.data() + i, &word, take);
    i += take;
  }
}

RandomSource RandomSource::derive(std::uint64_t stream) {
  if (!seed_) return from_os();
  return RandomSource(splitmix64(*seed_ ^ splitmix64(stream + 1)));
}

}  // namespace prk
