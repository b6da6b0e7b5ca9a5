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

#include "prk/vector_store.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <type_traits>

#include "prk/errors.hpp"

namespace prk::store {
namespace {

constexpr std::array<char, 4> kMagic = {'P', 'R', 'V', 'S'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>(value >> (8 * i));
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in, std::size_t record) {
  std::array<unsigned char, sizeof(T)> buf{};
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw IngestError(record, "truncated binary store");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[i]) << (8 * i);
  return value;
}

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id < b.id;
}

}  // namespace

Store Store::ingest(std::vector<RawRecord> records) {
  Store store;
  if (records.empty()) return store;
  const std::size_t n = records.front().embedding.size();
  if (n == 0) throw IngestError(0, "empty embedding");
  store.dimension_ = static_cast<int>(n);
  store.ids_.reserve(records.size());
  store.texts_.reserve(records.size());
  store.embeddings_.reserve(records.size() * n);
  store.index_.reserve(records.size());

  for (std::size_t i = 0; i < records.size(); ++i) {
    RawRecord& record = records[i];
    if (record.embedding.size() != n) {
      throw IngestError(i, "dimension " + std::to_string(record.embedding.size()) +
                               " differs from " + std::to_string(n));
    }
    if (!std::all_of(record.embedding.begin(), record.embedding.end(),
                     [](double x) { return std::isfinite(x); })) {
      throw IngestError(i, "non-finite embedding component");
    }
    if (!store.index_.emplace(record.id, i).second) {
      throw IngestError(i, "duplicate id " + std::to_string(record.id));
    }
    const double norm = l2_norm(record.embedding);
    if (!(norm > 0.0)) throw IngestError(i, "zero embedding");
    // Already-unit vectors are kept bit-exact so that stores round-trip.
    const double scale = std::abs(norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? 1.0 : norm;
    for (double x : record.embedding) store.embeddings_.push_back(x / scale);
    store.ids_.push_back(record.id);
    store.texts_.push_back(std::move(record.text));
  }
  return store;
}

std::span<const double> Store::embedding_at(std::size_t index) const {
  const auto n = static_cast<std::size_t>(dimension_);
  return std::span<const double>(embeddings_).subspan(index * n, n);
}

std::size_t Store::index_of(std::uint64_t id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw NotFoundError("unknown document id " + std::to_string(id));
  return it->second;
}

CandidateSet Store::top_k(std::span<const double> query, std::size_t k, Metric metric) const {
  if (k == 0) throw DomainError("top_k needs k >= 1");
  if (size() == 0) return {};
  if (query.size() != static_cast<std::size_t>(dimension_)) {
    throw DomainError("query dimension " + std::to_string(query.size()) + " differs from store " +
                      std::to_string(dimension_));
  }
  CandidateSet all(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto doc = embedding_at(i);
    all[i].id = ids_[i];
    all[i].distance =
        metric == Metric::Cosine ? cosine_distance(query, doc) : l2_distance(query, doc);
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    ranks_before);
  all.resize(take);
  for (std::size_t i = 0; i < take; ++i) all[i].position = static_cast<std::uint32_t>(i + 1);
  return all;
}

CandidateSet Store::all_by_id() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  CandidateSet out(size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out[i] = Candidate{static_cast<std::uint32_t>(i + 1), ids_[order[i]], 0.0};
  }
  return out;
}

std::vector<DocumentRecord> Store::fetch(std::span<const std::uint64_t> ids) const {
  std::vector<DocumentRecord> out;
  out.reserve(ids.size());
  for (std::uint64_t id : ids) {
    const std::size_t i = index_of(id);
    const auto e = embedding_at(i);
    out.push_back(DocumentRecord{
        id, UnitVector::from_normalized(std::vector<double>(e.begin(), e.end())), texts_[i]});
  }
  return out;
}

std::vector<RawRecord> read_jsonl(std::istream& in) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t index = records.size();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestError(index, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) throw IngestError(index, "record is not a JSON object");
    const auto id = j.find("id");
    const auto embedding = j.find("embedding");
    const auto text = j.find("text");
    if (id == j.end() || !id->is_number_unsigned()) {
      throw IngestError(index, "\"id\" must be a non-negative integer");
    }
    if (embedding == j.end() || !embedding->is_array()) {
      throw IngestError(index, "\"embedding\" must be an array of numbers");
    }
    if (text == j.end() || !text->is_string()) throw IngestError(index, "\"text\" must be a string");
    RawRecord record;
    record.id = id->get<std::uint64_t>();
    record.embedding.reserve(embedding->size());
    for (const auto& x : *embedding) {
      if (!x.is_number()) throw IngestError(index, "\"embedding\" must be an array of numbers");
      record.embedding.push_back(x.get<double>());
    }
    record.text = text->get<std::string>();
    records.push_back(std::move(record));
  }
  return records;
}

void write_jsonl(const Store& store, std::ostream& out) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto e = store.embedding_at(i);
    nlohmann::json j = {{"id", store.id_at(i)},
                        {"embedding", std::vector<double>(e.begin(), e.end())},
                        {"text", store.text_at(i)}};
    out << j.dump() << '\n';
  }
}

Store read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IngestError(0, "missing PRVS magic");
  }
  if (get_le<std::uint32_t>(in, 0) != kBinaryVersion) throw IngestError(0, "unsupported version");
  const auto n = get_le<std::uint32_t>(in, 0);
  const auto count = get_le<std::uint64_t>(in, 0);
  std::vector<RawRecord> records;
  records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto index = static_cast<std::size_t>(r);
    RawRecord record;
    record.id = get_le<std::uint64_t>(in, index);
    record.embedding.resize(n);
    for (double& x : record.embedding) x = std::bit_cast<double>(get_le<std::uint64_t>(in, index));
    const auto len = get_le<std::uint32_t>(in, index);
    record.text.resize(len);
    if (len > 0 && !in.read(record.text.data(), len)) throw IngestError(index, "truncated text");
    records.push_back(std::move(record));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IngestError(static_cast<std::size_t>(count), "trailing bytes after last record");
  }
  return Store::ingest(std::move(records));
}

void write_binary(const Store& store, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kBinaryVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.dimension()));
  put_le<std::uint64_t>(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    put_le<std::uint64_t>(out, store.id_at(i));
    for (double x : store.embedding_at(i)) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
    const std::string& text = store.text_at(i);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
}

Store load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open store file " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  const bool binary = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  if (binary) return read_binary(in);
  return Store::ingest(read_jsonl(in));
}

}  // namespace prk::store
