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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prk/embedding.hpp"

namespace prk::store {

struct RawRecord {
  std::uint64_t id = 0;
  std::vector<double> embedding;
  std::string text;
};

struct DocumentRecord {
  std::uint64_t id = 0;
  UnitVector embedding;
  std::string text;
};

// One entry of a ranked candidate list. Positions are 1-based.
struct Candidate {
  std::uint32_t position = 0;
  std::uint64_t id = 0;
  double distance = 0.0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

using CandidateSet = std::vector<Candidate>;

enum class Metric { Cosine, L2 };

// Flat, exact, immutable corpus of unit-norm embeddings.
class Store {
 public:
  Store() = default;

  // Normalizes every embedding. Throws IngestError (with the offending record
  // index) on dimension mismatch, duplicate id, non-finite or zero vectors.
  static Store ingest(std::vector<RawRecord> records);

  std::size_t size() const { return ids_.size(); }
  int dimension() const { return dimension_; }

  std::uint64_t id_at(std::size_t index) const { return ids_[index]; }
  std::span<const double> embedding_at(std::size_t index) const;
  const std::string& text_at(std::size_t index) const { return texts_[index]; }
  // Index of a known id; throws NotFoundError.
  std::size_t index_of(std::uint64_t id) const;

  // Exact k nearest records to query, distances nondecreasing, ties by
  // ascending id. k > N returns all N. Throws DomainError for k == 0 or a
  // dimension mismatch.
  CandidateSet top_k(std::span<const double> query, std::size_t k,
                     Metric metric = Metric::Cosine) const;
  // Every record in ascending id order with distance 0 (full-corpus scans).
  CandidateSet all_by_id() const;

  // Records in request order; throws NotFoundError naming the first unknown id.
  std::vector<DocumentRecord> fetch(std::span<const std::uint64_t> ids) const;

 private:
  int dimension_ = 0;
  std::vector<std::uint64_t> ids_;
  std::vector<double> embeddings_;
  std::vector<std::string> texts_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

// One JSON object per line: {"id": int, "embedding": [numbers], "text": str}.
// Blank lines are skipped; anything else that fails to parse is an IngestError.
std::vector<RawRecord> read_jsonl(std::istream& in);
void write_jsonl(const Store& store, std::ostream& out);

// "PRVS", u32 version = 1, u32 n, u64 N, then per record u64 id, n binary64,
// u32 text length, text bytes. All little-endian.
Store read_binary(std::istream& in);
void write_binary(const Store& store, std::ostream& out);

// Reads either format, chosen by the leading magic.
Store load_store(const std::string& path);

}  // namespace prk::store
