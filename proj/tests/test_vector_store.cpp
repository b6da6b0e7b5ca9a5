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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "prk/bench.hpp"
#include "prk/errors.hpp"
#include "test_support.hpp"

namespace {

using namespace prk;
using namespace prk::store;

Store small_store(std::size_t N, int n, std::uint64_t seed) {
  return bench::gen_uniform_corpus(N, n, seed);
}

TEST(Ingest, EmptyStream) {
  const Store s = Store::ingest({});
  EXPECT_EQ(s.size(), 0u);
}

TEST(Ingest, Normalizes) {
  const Store s = Store::ingest({{7, {2.0, 0.0, 0.0}, "a"}, {9, {0.0, 3.0, 4.0}, "b"}});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dimension(), 3);
  EXPECT_NEAR(l2_norm(s.embedding_at(0)), 1.0, 1e-12);
  EXPECT_NEAR(s.embedding_at(1)[2], 0.8, 1e-15);
  EXPECT_EQ(s.index_of(9), 1u);
  EXPECT_THROW(s.index_of(8), NotFoundError);
}

TEST(Ingest, RejectsBadRecordsWithIndex) {
  const auto index_of_failure = [](std::vector<RawRecord> records) {
    try {
      Store::ingest(std::move(records));
    } catch (const IngestError& e) {
      return static_cast<long>(e.record_index());
    }
    return -1L;
  };
  EXPECT_EQ(index_of_failure({{1, {1, 0}, ""}, {2, {1, 0, 0}, ""}}), 1);
  EXPECT_EQ(index_of_failure({{1, {1, 0}, ""}, {2, {0, 1}, ""}, {1, {1, 1}, ""}}), 2);
  EXPECT_EQ(index_of_failure({{1, {1, NAN}, ""}}), 0);
  EXPECT_EQ(index_of_failure({{1, {1, 0}, ""}, {2, {0, 0}, ""}}), 1);
}

TEST(Ingest, LargeSyntheticCorpus) {
  const Store s = small_store(10000, 48, 1);
  EXPECT_EQ(s.size(), 10000u);
  EXPECT_EQ(s.dimension(), 48);
  EXPECT_EQ(s.id_at(0), 1u);
  EXPECT_EQ(s.text_at(41), "doc 42");
}

TEST(TopK, SelfMatchFirst) {
  const Store s = small_store(500, 16, 2);
  const auto q = s.embedding_at(123);
  const CandidateSet c = s.top_k(q, 3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].id, s.id_at(123));
  EXPECT_NEAR(c[0].distance, 0.0, 1e-9);
  EXPECT_EQ(c[0].position, 1u);
  EXPECT_EQ(c[2].position, 3u);
}

TEST(TopK, AllAndMore) {
  const Store s = small_store(50, 8, 3);
  RandomSource rng(3);
  const auto q = prk::testing::random_unit(8, rng);
  const CandidateSet all = s.top_k(q, 50);
  EXPECT_EQ(all.size(), 50u);
  EXPECT_EQ(s.top_k(q, 80), all);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance < b.distance;
  }));
  EXPECT_THROW(s.top_k(q, 0), DomainError);
  EXPECT_THROW(s.top_k(std::vector<double>(9, 0.1), 1), DomainError);
}

TEST(TopK, TiesByAscendingId) {
  const Store s = Store::ingest({{30, {1, 0}, ""}, {10, {1, 0}, ""}, {20, {0, 1}, ""}, {5, {1, 0}, ""}});
  const CandidateSet c = s.top_k(std::vector<double>{1.0, 0.0}, 3);
  EXPECT_EQ(c[0].id, 5u);
  EXPECT_EQ(c[1].id, 10u);
  EXPECT_EQ(c[2].id, 30u);
}

// Independent oracle: full sort of (1 - dot, id).
TEST(TopK, MatchesBruteForce) {
  const Store s = small_store(2000, 24, 4);
  RandomSource rng(4);
  for (int t = 0; t < 1000; ++t) {
    const auto q = prk::testing::random_unit(24, rng);
    std::vector<std::pair<double, std::uint64_t>> all;
    for (std::size_t i = 0; i < s.size(); ++i) {
      double d = 0.0;
      for (int j = 0; j < 24; ++j) d += q[j] * s.embedding_at(i)[j];
      all.emplace_back(1.0 - d, s.id_at(i));
    }
    std::sort(all.begin(), all.end());
    const CandidateSet c = s.top_k(q, 10);
    for (int j = 0; j < 10; ++j) ASSERT_EQ(c[j].id, all[j].second);
  }
}

TEST(TopK, Deterministic) {
  const Store s = small_store(300, 12, 5);
  RandomSource rng(5);
  const auto q = prk::testing::random_unit(12, rng);
  EXPECT_EQ(s.top_k(q, 20), s.top_k(q, 20));
}

TEST(TopK, L2AndCosineAgree) {
  const Store s = small_store(1000, 32, 6);
  RandomSource rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto q = prk::testing::random_unit(32, rng);
    const auto a = s.top_k(q, 10, Metric::Cosine);
    const auto b = s.top_k(q, 10, Metric::L2);
    for (int j = 0; j < 10; ++j) ASSERT_EQ(a[j].id, b[j].id);
  }
}

TEST(Metrics, L2IsRootTwiceCosine) {
  RandomSource rng(7);
  for (int t = 0; t < 10000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 200);
    const auto a = prk::testing::random_unit(n, rng);
    const auto b = prk::testing::random_unit(n, rng);
    EXPECT_NEAR(l2_distance(a, b), std::sqrt(2.0 * cosine_distance(a, b)), 1e-9);
  }
}

TEST(Fetch, OrderAndErrors) {
  const Store s = small_store(20, 4, 8);
  EXPECT_TRUE(s.fetch({}).empty());
  const std::vector<std::uint64_t> one{7};
  EXPECT_EQ(s.fetch(one)[0].text, "doc 7");
  const std::vector<std::uint64_t> ids{5, 19, 2, 11};
  const auto recs = s.fetch(ids);
  ASSERT_EQ(recs.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(recs[i].id, ids[i]);
  const std::vector<std::uint64_t> bad{3, 99};
  try {
    s.fetch(bad);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST(Jsonl, RoundTrip) {
  const Store s = small_store(30, 6, 9);
  std::stringstream buf;
  write_jsonl(s, buf);
  const Store back = Store::ingest(read_jsonl(buf));
  ASSERT_EQ(back.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_EQ(back.id_at(i), s.id_at(i));
    EXPECT_EQ(back.text_at(i), s.text_at(i));
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(back.embedding_at(i)[j], s.embedding_at(i)[j], 1e-15);
  }
}

TEST(Jsonl, StrictParsing) {
  const auto fails_at = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_jsonl(in);
    } catch (const IngestError& e) {
      return static_cast<long>(e.record_index());
    }
    return -1L;
  };
  EXPECT_EQ(fails_at("{\"id\":1,\"embedding\":[1,0],\"text\":\"a\"}\n\n{\"id\":2,\"embedding\":[0,1],\"text\":\"b\"}\n"), -1);
  EXPECT_EQ(fails_at("{\"id\":1,\"embedding\":[1,0],\"text\":\"a\"} junk\n"), 0);
  EXPECT_EQ(fails_at("{\"id\":1,\"embedding\":[1,0],\"text\":\"a\"}\n{\"id\":-2,\"embedding\":[1,0],\"text\":\"a\"}\n"), 1);
  EXPECT_EQ(fails_at("{\"id\":1,\"embedding\":[1,\"x\"],\"text\":\"a\"}\n"), 0);
  EXPECT_EQ(fails_at("{\"id\":1,\"embedding\":[1,0]}\n"), 0);
  EXPECT_EQ(fails_at("[1,2]\n"), 0);
}

TEST(Binary, RoundTripAndLayout) {
  const Store s = small_store(25, 5, 10);
  std::stringstream buf;
  write_binary(s, buf);
  const std::string bytes = buf.str();
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 4), "PRVS");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 5);  // n
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 25);  // N
  const Store back = read_binary(buf);
  ASSERT_EQ(back.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_EQ(back.id_at(i), s.id_at(i));
    for (int j = 0; j < 5; ++j) EXPECT_EQ(back.embedding_at(i)[j], s.embedding_at(i)[j]);
  }
}

TEST(Binary, RejectsCorruption) {
  const Store s = small_store(3, 4, 11);
  std::stringstream buf;
  write_binary(s, buf);
  const std::string good = buf.str();
  for (const std::string& bad : {std::string("XXXX") + good.substr(4), good.substr(0, good.size() - 1), good + "x"}) {
    std::istringstream in(bad);
    EXPECT_ANY_THROW(read_binary(in));
  }
}

TEST(LoadStore, DetectsFormat) {
  const Store s = small_store(10, 3, 12);
  const std::string bin = ::testing::TempDir() + "prk_store.bin";
  const std::string jsonl = ::testing::TempDir() + "prk_store.jsonl";
  {
    std::ofstream a(bin, std::ios::binary);
    write_binary(s, a);
    std::ofstream b(jsonl);
    write_jsonl(s, b);
  }
  EXPECT_EQ(load_store(bin).size(), 10u);
  EXPECT_EQ(load_store(jsonl).text_at(3), "doc 4");
  std::remove(bin.c_str());
  std::remove(jsonl.c_str());
}

}  // namespace
