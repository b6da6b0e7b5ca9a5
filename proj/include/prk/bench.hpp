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

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prk/paillier.hpp"
#include "prk/protocol.hpp"
#include "prk/vector_store.hpp"

namespace prk::bench {

// Flat key=value experiment description. Standard mode takes exactly one of
// epsilon, r (mean perturbation radius, epsilon = n / r) and k_prime.
struct ExperimentConfig {
  std::uint64_t N = 10000;
  int n = 128;
  std::uint64_t k = 5;
  std::optional<double> epsilon;
  std::optional<double> r;
  std::optional<std::uint64_t> k_prime;
  std::uint64_t trials = 50;
  std::uint64_t seed = 1;
  protocol::Mode mode = protocol::Mode::Standard;
  double safety = 1.0;
  unsigned key_bits = 1024;
  ot::GroupId ot_group = ot::GroupId::Test256;
  bool merge_rounds = true;
  std::optional<std::string> embeddings;  // real corpus instead of synthetic
  std::vector<std::uint64_t> k_prime_grid{40, 80, 160, 320};
  unsigned repeats = 1;  // pipeline timing repetitions, minimum kept

  // Throws ConfigError.
  void validate() const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
};

// N i.i.d. uniform unit vectors in R^n with ids 1..N and text "doc <id>".
store::Store gen_uniform_corpus(std::uint64_t N, int n, std::uint64_t seed);

struct TrialOutcome {
  double recall = 0.0;
  std::uint64_t k_prime = 0;
  Route route = Route::Direct;
  // Plaintext top-k lies inside the cloud's candidate range.
  bool included = false;
  // Returned ids equal the plaintext top-k, in order.
  bool exact = false;
  std::size_t audit_violations = 0;
};

struct RecallResult {
  std::vector<TrialOutcome> trials;

  double mean_recall() const;
  double full_recall_fraction() const;
};

// Runs config.trials loopback sessions against fresh uniform queries. A
// corpus and keys may be supplied to share them across experiments.
RecallResult recall_experiment(const ExperimentConfig& config,
                               const store::Store* corpus = nullptr,
                               std::shared_ptr<const he::KeyPair> keys = nullptr);
void write_recall_csv(const RecallResult& result, std::ostream& out);

enum class CurveKind { GammaPdf, EpsilonKprime, KOverNAlpha };

CurveKind parse_curve_kind(const std::string& name);
void emit_curves(CurveKind kind, const ExperimentConfig& config, std::ostream& out);

struct PipelineMeasurement {
  std::uint64_t k_prime = 0;
  Route route = Route::Direct;
  protocol::PhaseTimes seconds;  // client and cloud compute phases
  protocol::CostReport costs;

  double total_seconds() const;
  // Encrypting the query, the cloud's encrypted dot products and ranking.
  double encrypted_distance_seconds() const;
};

// One session per (k', route) with k' pinned. Keys default to a fresh pair of
// config.key_bits.
std::vector<PipelineMeasurement> bench_pipeline(const ExperimentConfig& config,
                                                const store::Store* corpus = nullptr,
                                                std::shared_ptr<const he::KeyPair> keys = nullptr);
// Columns k_prime, route, phase, seconds, bytes.
void write_pipeline_csv(const std::vector<PipelineMeasurement>& rows, std::ostream& out);

}  // namespace prk::bench
