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

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>

namespace prk {

// Uniform bit source used by every randomized operation in the library.
//
// A seeded source is a deterministic mt19937_64 stream (tests, golden
// transcripts, PRK_TEST_SEED). The default source pulls from the operating
// system CSPRNG. Satisfies UniformRandomBitGenerator so it plugs into
// <random> distributions.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed);
  static RandomSource from_os();
  // Seeded from the named environment variable when set, OS entropy otherwise.
  static RandomSource from_env(const char* var = "PRK_TEST_SEED");

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform01();
  double normal();
  void fill(std::span<std::uint8_t> out);

  bool deterministic() const { return seed_.has_value(); }
  // Independent child stream; deterministic children for seeded sources.
  RandomSource derive(std::uint64_t stream);

 private:
  RandomSource() = default;

  std::optional<std::uint64_t> seed_;
  std::mt19937_64 engine_;
  std::array<std::uint64_t, 64> pool_{};
  std::size_t pool_pos_ = pool_.size();
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace prk
