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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prk/dp_perturbation.hpp"
#include "prk/embedding.hpp"
#include "prk/oblivious_transfer.hpp"
#include "prk/paillier.hpp"
#include "prk/random.hpp"
#include "prk/sphere_geometry.hpp"
#include "prk/vector_store.hpp"
#include "prk/wire.hpp"

namespace prk::protocol {

using wire::Mode;

// Seconds of compute per named phase.
using PhaseTimes = std::map<std::string, double>;

struct RetrievalPlan {
  std::uint64_t k = 0;
  std::uint64_t k_prime = 0;
  double realized_delta_alpha = 0.0;
  double alpha_k = 0.0;
  double omega = 0.0;
  Route route = Route::Direct;
  Mode mode = Mode::Standard;
};

struct CostReport {
  double rounds = 0.0;
  std::uint64_t beta_units = 0;  // transmitted numbers
  std::uint64_t eta_units = 0;   // transmitted documents
  std::map<std::string, std::uint64_t> bytes_by_phase;

  std::uint64_t total_bytes() const;
};

struct UnitCounts {
  double rounds = 0.0;
  std::uint64_t beta_units = 0;
  std::uint64_t eta_units = 0;
  friend bool operator==(const UnitCounts&, const UnitCounts&) = default;
};

// Closed-form communication for one request:
//   ignorant           1 round,   n,            k
//   conscious          2 rounds,  n + 2N + 1,   N
//   standard, direct   2 rounds,  2n + k + k' + 1, k
//   standard, OT       2 rounds,  2(n + k' + 1),   k'
// Unmerged schedules take 2.5 (direct / conscious) and 3 (OT) rounds.
UnitCounts closed_form_units(Mode mode, Route route, std::uint64_t n, std::uint64_t k,
                             std::uint64_t k_prime, std::uint64_t corpus_size, bool merged = true);

struct ClientConfig {
  std::uint64_t k = 5;
  // Standard mode takes exactly one of epsilon and k_prime_target.
  std::optional<double> epsilon;
  std::optional<std::uint64_t> k_prime_target;
  Mode mode = Mode::Standard;
  // Send the perturbed and encrypted query together and let the cloud open
  // OT alongside its reply (2 rounds). Off: 2.5 / 3 rounds.
  bool merge_rounds = true;
  std::optional<Route> force_route;
  // Pins k' instead of deriving it from the realized perturbation (benchmarks).
  std::optional<std::uint64_t> fixed_k_prime;
  double safety = 1.0;
  std::uint64_t corpus_size = 0;
  std::shared_ptr<const he::KeyPair> keys;
  unsigned scale_bits = 40;
  ot::GroupId ot_group = ot::GroupId::Modp2048;

  // Throws ConfigError on inconsistent settings for an n-dimensional query.
  void validate(int n) const;
};

// Client side of one retrieval. Methods must be called in protocol order;
// out-of-order calls raise StateError.
class ClientSession {
 public:
  struct Opened;

  // Perturbs the query, fixes k' and the route, and builds the first
  // message(s): one PHASE1 when merged, two when not.
  static Opened open(const UnitVector& query, const ClientConfig& config, RandomSource& rng);

  // Decrypts the k' encrypted dot products and returns the k best candidate
  // positions, best first (ties to the lower position).
  std::vector<std::uint32_t> rank(const wire::Frame& reply);
  // Unmerged OT schedule: A arrives in its own frame.
  void receive_ot_a(const wire::Frame& frame);
  bool has_ot_a() const { return ot_a_.has_value(); }

  wire::Frame fetch_direct(std::span<const std::uint32_t> positions);
  std::vector<std::string> receive_documents(const wire::Frame& frame);

  wire::Frame ot_choose(RandomSource& rng);
  std::vector<std::string> ot_finish(const wire::Frame& frame);

  // Throws StateError until the documents have arrived.
  CostReport cost_report() const;

  const RetrievalPlan& plan() const { return plan_; }
  const std::vector<std::uint32_t>& ranked_positions() const { return ranked_; }
  const PhaseTimes& timings() const { return timings_; }
  bool complete() const { return stage_ == Stage::Complete; }

 private:
  enum class Stage { AwaitReply, Ranked, AwaitDocuments, AwaitWrapped, Complete };

  ClientSession(const UnitVector& query, const ClientConfig& config);
  void count_sent(const wire::Frame& f, const char* phase);
  void count_received(const wire::Frame& f, const char* phase);

  ClientConfig config_;
  UnitVector query_;
  RetrievalPlan plan_;
  std::optional<he::FixedPointCodec> codec_;
  Stage stage_ = Stage::AwaitReply;
  std::vector<std::uint32_t> ranked_;
  std::optional<mpz_class> ot_a_;
  std::optional<ot::OtGroup> group_;
  std::optional<ot::OtReceiverState> receiver_;

  std::uint64_t legs_ = 0;
  std::uint64_t beta_ = 0;
  std::uint64_t eta_ = 0;
  std::map<std::string, std::uint64_t> bytes_;
  PhaseTimes timings_;
};

struct ClientSession::Opened {
  ClientSession session;
  std::vector<wire::Frame> messages;
};

// Cloud side of one retrieval over an immutable store.
class CloudSession {
 public:
  explicit CloudSession(const store::Store& store, RandomSource rng = RandomSource::from_os());

  // Replies to one client frame (possibly none). Throws ProtocolError on
  // malformed or out-of-order input.
  std::vector<wire::Frame> handle(const wire::Frame& frame);
  // As handle, converting failures into a single ERROR frame.
  std::vector<wire::Frame> handle_or_error(const wire::Frame& frame);

  const store::CandidateSet& candidates() const { return candidates_; }
  const PhaseTimes& timings() const { return timings_; }

 private:
  std::vector<wire::Frame> on_phase1(const wire::Frame& frame);
  std::vector<wire::Frame> on_fetch_direct(const wire::Frame& frame);
  std::vector<wire::Frame> on_ot_b(const wire::Frame& frame);

  const store::Store* store_;
  RandomSource rng_;
  store::CandidateSet candidates_;
  bool have_candidates_ = false;
  std::optional<ot::OtGroup> group_;
  std::optional<ot::OtSenderState> sender_;
  PhaseTimes timings_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const wire::Frame& frame) = 0;
  virtual wire::Frame receive() = 0;
};

enum class Direction { ClientToCloud, CloudToClient };

struct TranscriptEntry {
  Direction direction;
  wire::Frame frame;
};

// In-process transport feeding frames straight into a CloudSession and
// recording both directions.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(CloudSession& cloud) : cloud_(&cloud) {}

  void send(const wire::Frame& frame) override;
  wire::Frame receive() override;

  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 private:
  CloudSession* cloud_;
  std::deque<wire::Frame> inbox_;
  std::vector<TranscriptEntry> transcript_;
};

struct QueryResult {
  std::vector<std::uint32_t> positions;
  std::vector<std::string> documents;
  RetrievalPlan plan;
  CostReport costs;
  PhaseTimes client_timings;
};

// Runs the oblivious-transfer fetch for a ranked session.
std::vector<std::string> run_ot_fetch(ClientSession& session, Transport& transport,
                                      RandomSource& rng);

// Full client flow: open, rank, then direct or OT fetch.
QueryResult run_query(const UnitVector& query, const ClientConfig& config, Transport& transport,
                      RandomSource& rng);

// Checks that the cloud saw only whitelisted fields: the perturbed embedding
// (never the query itself outside the ignorant mode), k', k, the public key,
// ciphertexts, and either candidate positions (direct) or OT blinding values.
// Returns one line per violation; empty means clean.
std::vector<std::string> audit_transcript(std::span<const TranscriptEntry> transcript,
                                          const RetrievalPlan& plan, const UnitVector& query);

}  // namespace prk::protocol
