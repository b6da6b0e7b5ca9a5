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

#include "prk/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "prk/errors.hpp"

namespace prk::protocol {
namespace {

class ScopedTimer {
 public:
  ScopedTimer(PhaseTimes& times, std::string phase)
      : times_(times), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    times_[phase_] += elapsed.count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  PhaseTimes& times_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

std::uint64_t CostReport::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& [phase, bytes] : bytes_by_phase) total += bytes;
  return total;
}

UnitCounts closed_form_units(Mode mode, Route route, std::uint64_t n, std::uint64_t k,
                             std::uint64_t k_prime, std::uint64_t corpus_size, bool merged) {
  switch (mode) {
    case Mode::PrivacyIgnorant:
      return {1.0, n, k};
    case Mode::PrivacyConscious:
      return {merged ? 2.0 : 2.5, n + 2 * corpus_size + 1, corpus_size};
    case Mode::Standard:
      if (route == Route::Direct) return {merged ? 2.0 : 2.5, 2 * n + k + k_prime + 1, k};
      return {merged ? 2.0 : 3.0, 2 * (n + k_prime + 1), k_prime};
  }
  throw DomainError("unknown mode");
}

void ClientConfig::validate(int n) const {
  if (n < 2) throw ConfigError("query dimension must be >= 2");
  if (corpus_size < 1) throw ConfigError("corpus size N must be known and >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k > corpus_size) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds corpus size " +
                      std::to_string(corpus_size));
  }
  if (mode == Mode::PrivacyIgnorant) return;
  if (!keys) throw ConfigError("encryption keys are required outside the ignorant mode");
  if (mode == Mode::Standard) {
    if (epsilon.has_value() == k_prime_target.has_value()) {
      throw ConfigError("standard mode needs exactly one of epsilon and k' target");
    }
    if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) {
      throw ConfigError("epsilon must be finite and > 0");
    }
    if (k_prime_target && (*k_prime_target <= k || *k_prime_target > corpus_size)) {
      throw ConfigError("k' target must lie in (k, N]");
    }
    if (!(safety >= 0.0) || !std::isfinite(safety)) throw ConfigError("safety must be >= 0");
  }
}

ClientSession::ClientSession(const UnitVector& query, const ClientConfig& config)
    : config_(config), query_(query) {}

void ClientSession::count_sent(const wire::Frame& f, const char* phase) {
  ++legs_;
  bytes_[phase] += f.wire_size();
}

void ClientSession::count_received(const wire::Frame& f, const char* phase) {
  ++legs_;
  bytes_[phase] += f.wire_size();
}

ClientSession::Opened ClientSession::open(const UnitVector& query, const ClientConfig& config,
                                          RandomSource& rng) {
  const int n = static_cast<int>(query.dimension());
  config.validate(n);
  ClientSession s(query, config);
  RetrievalPlan& plan = s.plan_;
  plan.k = config.k;
  plan.mode = config.mode;
  const std::uint64_t total = config.corpus_size;

  wire::Phase1 msg;
  msg.n = static_cast<std::uint32_t>(n);
  msg.k = static_cast<std::uint32_t>(config.k);
  msg.mode = config.mode;
  msg.ot_group = config.ot_group;

  switch (config.mode) {
    case Mode::PrivacyIgnorant:
      plan.k_prime = config.k;
      plan.route = Route::Direct;
      msg.embedding = std::vector<double>(query.values().begin(), query.values().end());
      break;
    case Mode::PrivacyConscious:
      plan.k_prime = total;
      plan.route = Route::ObliviousTransfer;
      break;
    case Mode::Standard: {
      ScopedTimer timer(s.timings_, "perturb");
      const auto params = sphere::SphereParams::make(n, total);
      const dp::PrivacyBudget budget =
          config.epsilon ? dp::PrivacyBudget::of(*config.epsilon)
                         : dp::calibrate_epsilon(params, config.k, *config.k_prime_target);
      dp::Perturbation perturbation = dp::perturb(query, budget, rng);
      const PolarAngle delta = perturbation.sample.realized_delta_alpha;
      const PolarAngle alpha_k = sphere::alpha_from_k(params, static_cast<double>(config.k));
      plan.realized_delta_alpha = delta.value();
      plan.alpha_k = alpha_k.value();
      plan.k_prime = config.fixed_k_prime
                         ? std::clamp<std::uint64_t>(*config.fixed_k_prime, config.k, total)
                         : sphere::expanded_k_prime(params, config.k, delta, config.safety);
      if (alpha_k.value() < 0.5 * std::numbers::pi) {
        const PolarAngle omega = sphere::mean_angle(config.k, alpha_k);
        plan.omega = omega.value();
        plan.route = sphere::leakage_route(omega, delta);
      } else {
        // No acute cap, so no centroid bound: protect the indices.
        plan.omega = 0.5 * std::numbers::pi;
        plan.route = Route::ObliviousTransfer;
      }
      if (config.force_route) plan.route = *config.force_route;
      const auto values = perturbation.perturbed.values();
      msg.embedding = std::vector<double>(values.begin(), values.end());
      break;
    }
  }
  msg.k_prime = static_cast<std::uint32_t>(plan.k_prime);

  if (config.mode != Mode::PrivacyIgnorant) {
    s.group_ = ot::OtGroup::from_id(config.ot_group);
    s.codec_.emplace(config.keys->pub.modulus, config.scale_bits, static_cast<std::size_t>(n));
    ScopedTimer timer(s.timings_, "encrypt_query");
    msg.scale_bits = static_cast<std::uint8_t>(config.scale_bits);
    msg.he_modulus = config.keys->pub.modulus;
    msg.ciphertexts = he::encrypt_vector(*config.keys, *s.codec_, query.values(), rng);
  }
  if (plan.route == Route::ObliviousTransfer) {
    msg.flags = wire::flags::kStartOt;
    if (!config.merge_rounds) msg.flags |= wire::flags::kSeparateA;
  }

  std::vector<wire::Frame> frames;
  if (config.mode == Mode::Standard && !config.merge_rounds) {
    wire::Phase1 range_only = msg;
    range_only.he_modulus.reset();
    range_only.ciphertexts.clear();
    wire::Phase1 encrypted_only = std::move(msg);
    encrypted_only.embedding.reset();
    frames.push_back(wire::encode(range_only));
    frames.push_back(wire::encode(encrypted_only));
  } else {
    frames.push_back(wire::encode(msg));
  }
  for (const auto& f : frames) s.count_sent(f, "phase1");

  // Perturbed embedding and k' (standard only), then the encrypted query.
  const auto nn = static_cast<std::uint64_t>(n);
  switch (config.mode) {
    case Mode::Standard: s.beta_ += nn + 1 + nn; break;
    case Mode::PrivacyConscious: s.beta_ += nn; break;
    case Mode::PrivacyIgnorant: s.beta_ += nn; break;
  }
  return Opened{std::move(s), std::move(frames)};
}

std::vector<std::uint32_t> ClientSession::rank(const wire::Frame& reply) {
  if (stage_ != Stage::AwaitReply || plan_.mode == Mode::PrivacyIgnorant) {
    throw StateError("rank() called out of order");
  }
  const wire::Phase1Reply msg = wire::decode_phase1_reply(reply);
  count_received(reply, "phase1_reply");
  if (msg.ciphertexts.size() != plan_.k_prime) {
    throw ProtocolError("expected " + std::to_string(plan_.k_prime) + " encrypted distances, got " +
                        std::to_string(msg.ciphertexts.size()));
  }
  beta_ += msg.ciphertexts.size();
  if (msg.ot_a) {
    if (plan_.route != Route::ObliviousTransfer) throw ProtocolError("unexpected OT value");
    ot_a_ = msg.ot_a;
    beta_ += 1;
  }

  ScopedTimer timer(timings_, "decrypt_rank");
  std::vector<double> distance(msg.ciphertexts.size());
  for (std::size_t i = 0; i < distance.size(); ++i) {
    const mpz_class m = he::decrypt(*config_.keys, msg.ciphertexts[i]);
    distance[i] = 1.0 - codec_->decode_product(m);
  }
  std::vector<std::uint32_t> order(distance.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t take = std::min<std::size_t>(plan_.k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (distance[a] != distance[b]) return distance[a] < distance[b];
                      return a < b;
                    });
  ranked_.clear();
  for (std::size_t i = 0; i < take; ++i) ranked_.push_back(order[i] + 1);
  stage_ = Stage::Ranked;
  return ranked_;
}

void ClientSession::receive_ot_a(const wire::Frame& frame) {
  if (stage_ != Stage::Ranked || plan_.route != Route::ObliviousTransfer || ot_a_) {
    throw StateError("receive_ot_a() called out of order");
  }
  ot_a_ = wire::decode_ot_a(frame).value;
  count_received(frame, "ot_a");
  beta_ += 1;
}

wire::Frame ClientSession::fetch_direct(std::span<const std::uint32_t> positions) {
  if (stage_ != Stage::Ranked || plan_.route != Route::Direct) {
    throw StateError("fetch_direct() requires a ranked session on the direct route");
  }
  for (std::uint32_t p : positions) {
    if (p < 1 || p > plan_.k_prime) {
      throw ProtocolError("position " + std::to_string(p) + " outside [1, k']");
    }
  }
  wire::FetchDirect msg;
  msg.positions.assign(positions.begin(), positions.end());
  wire::Frame frame = wire::encode(msg);
  count_sent(frame, "fetch_direct");
  beta_ += positions.size();
  ranked_.assign(positions.begin(), positions.end());
  stage_ = Stage::AwaitDocuments;
  return frame;
}

std::vector<std::string> ClientSession::receive_documents(const wire::Frame& frame) {
  const bool ignorant = plan_.mode == Mode::PrivacyIgnorant && stage_ == Stage::AwaitReply;
  if (!ignorant && stage_ != Stage::AwaitDocuments) {
    throw StateError("receive_documents() called out of order");
  }
  wire::Documents msg = wire::decode_documents(frame);
  count_received(frame, "documents");
  if (ignorant) {
    if (msg.texts.size() > plan_.k) throw ProtocolError("too many documents");
    ranked_.resize(msg.texts.size());
    std::iota(ranked_.begin(), ranked_.end(), 1u);
  } else if (msg.texts.size() != ranked_.size()) {
    throw ProtocolError("document count differs from request");
  }
  eta_ += msg.texts.size();
  stage_ = Stage::Complete;
  return std::move(msg.texts);
}

wire::Frame ClientSession::ot_choose(RandomSource& rng) {
  if (stage_ != Stage::Ranked || plan_.route != Route::ObliviousTransfer || !ot_a_) {
    throw StateError("ot_choose() requires a ranked OT session holding A");
  }
  ScopedTimer timer(timings_, "ot_receiver");
  ot::ReceiverChoice choice = ot::ot_receiver_choose(
      *group_, *ot_a_, ranked_, static_cast<std::uint32_t>(plan_.k_prime), rng);
  receiver_ = std::move(choice.state);
  wire::Frame frame = wire::encode(wire::OtB{std::move(choice.B)});
  count_sent(frame, "ot_b");
  beta_ += plan_.k_prime;
  stage_ = Stage::AwaitWrapped;
  return frame;
}

std::vector<std::string> ClientSession::ot_finish(const wire::Frame& frame) {
  if (stage_ != Stage::AwaitWrapped) throw StateError("ot_finish() called out of order");
  const wire::OtWrapped msg = wire::decode_ot_wrapped(frame);
  count_received(frame, "ot_wrapped");
  eta_ += msg.messages.size();
  ScopedTimer timer(timings_, "ot_receiver");
  const auto received = ot::ot_receiver_decrypt(*group_, *receiver_, *ot_a_, msg.messages);
  std::vector<std::string> out;
  out.reserve(ranked_.size());
  for (std::uint32_t position : ranked_) {
    const auto it = std::find_if(received.begin(), received.end(),
                                 [&](const ot::ReceivedMessage& r) { return r.position == position; });
    out.emplace_back(it->message.begin(), it->message.end());
  }
  stage_ = Stage::Complete;
  return out;
}

CostReport ClientSession::cost_report() const {
  if (stage_ != Stage::Complete) throw StateError("session incomplete");
  CostReport report;
  report.rounds = 0.5 * static_cast<double>(legs_);
  report.beta_units = beta_;
  report.eta_units = eta_;
  report.bytes_by_phase = bytes_;
  return report;
}

CloudSession::CloudSession(const store::Store& store, RandomSource rng)
    : store_(&store), rng_(std::move(rng)) {}

std::vector<wire::Frame> CloudSession::handle(const wire::Frame& frame) {
  switch (frame.tag) {
    case wire::Tag::Phase1: return on_phase1(frame);
    case wire::Tag::FetchDirect: return on_fetch_direct(frame);
    case wire::Tag::OtB: return on_ot_b(frame);
    case wire::Tag::InfoRequest:
      if (!frame.payload.empty()) throw ProtocolError("INFO_REQUEST carries no payload");
      return {wire::encode(wire::Info{static_cast<std::uint32_t>(store_->dimension()),
                                      store_->size()})};
    default:
      throw ProtocolError(std::string("unexpected ") + wire::to_string(frame.tag) + " frame");
  }
}

std::vector<wire::Frame> CloudSession::handle_or_error(const wire::Frame& frame) {
  try {
    return handle(frame);
  } catch (const ProtocolError& e) {
    return {wire::encode(wire::Error{wire::error_code::kProtocol, e.what()})};
  } catch (const std::invalid_argument& e) {
    return {wire::encode(wire::Error{wire::error_code::kDomain, e.what()})};
  } catch (const std::exception& e) {
    return {wire::encode(wire::Error{wire::error_code::kInternal, e.what()})};
  }
}

std::vector<wire::Frame> CloudSession::on_phase1(const wire::Frame& frame) {
  const wire::Phase1 msg = wire::decode_phase1(frame);
  if (static_cast<int>(msg.n) != store_->dimension()) {
    throw ProtocolError("query dimension " + std::to_string(msg.n) + " differs from store " +
                        std::to_string(store_->dimension()));
  }
  if (msg.k < 1 || msg.k_prime < msg.k) throw ProtocolError("need 1 <= k <= k'");
  const std::size_t k_prime = std::min<std::size_t>(msg.k_prime, store_->size());

  switch (msg.mode) {
    case Mode::PrivacyIgnorant: {
      if (!msg.embedding || msg.he_modulus) throw ProtocolError("malformed ignorant request");
      ScopedTimer timer(timings_, "candidate_search");
      candidates_ = store_->top_k(*msg.embedding, msg.k);
      wire::Documents docs;
      for (const auto& c : candidates_) docs.texts.push_back(store_->text_at(store_->index_of(c.id)));
      return {wire::encode(docs)};
    }
    case Mode::PrivacyConscious:
      if (msg.embedding || !msg.he_modulus) throw ProtocolError("malformed conscious request");
      candidates_ = store_->all_by_id();
      have_candidates_ = true;
      break;
    case Mode::Standard:
      if (msg.embedding) {
        ScopedTimer timer(timings_, "candidate_search");
        candidates_ = store_->top_k(*msg.embedding, k_prime);
        have_candidates_ = true;
      }
      if (!msg.he_modulus) {
        if (!msg.embedding) throw ProtocolError("empty PHASE1");
        return {};
      }
      if (!have_candidates_) throw ProtocolError("encrypted query before the candidate range");
      break;
  }

  const he::PublicKey pk = he::PublicKey::from_modulus(*msg.he_modulus);
  const he::FixedPointCodec codec(pk.modulus, msg.scale_bits, msg.n);
  wire::Phase1Reply reply;
  {
    ScopedTimer timer(timings_, "encrypted_distance");
    const he::DotEvaluator evaluator(pk, codec, msg.ciphertexts);
    reply.ciphertexts.reserve(candidates_.size());
    for (const auto& c : candidates_) {
      reply.ciphertexts.push_back(evaluator.dot(store_->embedding_at(store_->index_of(c.id))));
    }
  }
  std::vector<wire::Frame> out;
  if (msg.flags & wire::flags::kStartOt) {
    ScopedTimer timer(timings_, "ot_sender");
    group_ = ot::OtGroup::from_id(msg.ot_group);
    sender_ = ot::ot_sender_init(*group_, rng_);
    if (!(msg.flags & wire::flags::kSeparateA)) reply.ot_a = sender_->A;
  }
  out.push_back(wire::encode(reply));
  if (sender_ && (msg.flags & wire::flags::kSeparateA)) {
    out.push_back(wire::encode(wire::OtA{sender_->A}));
  }
  return out;
}

std::vector<wire::Frame> CloudSession::on_fetch_direct(const wire::Frame& frame) {
  const wire::FetchDirect msg = wire::decode_fetch_direct(frame);
  if (!have_candidates_) throw ProtocolError("FETCH_DIRECT before any candidates");
  ScopedTimer timer(timings_, "fetch");
  wire::Documents docs;
  for (std::uint32_t p : msg.positions) {
    if (p < 1 || p > candidates_.size()) {
      throw ProtocolError("position " + std::to_string(p) + " outside the candidate range");
    }
    docs.texts.push_back(store_->text_at(store_->index_of(candidates_[p - 1].id)));
  }
  return {wire::encode(docs)};
}

std::vector<wire::Frame> CloudSession::on_ot_b(const wire::Frame& frame) {
  const wire::OtB msg = wire::decode_ot_b(frame);
  if (!sender_) throw ProtocolError("OT_B without an open transfer");
  if (msg.values.size() != candidates_.size()) {
    throw ProtocolError("OT_B carries " + std::to_string(msg.values.size()) + " values for " +
                        std::to_string(candidates_.size()) + " candidates");
  }
  ScopedTimer timer(timings_, "ot_sender");
  std::vector<ot::Bytes> messages;
  messages.reserve(candidates_.size());
  for (const auto& c : candidates_) messages.push_back(as_bytes(store_->text_at(store_->index_of(c.id))));
  wire::OtWrapped wrapped{ot::ot_sender_encrypt(*group_, *sender_, msg.values, messages)};
  sender_.reset();
  return {wire::encode(wrapped)};
}

void LoopbackTransport::send(const wire::Frame& frame) {
  transcript_.push_back({Direction::ClientToCloud, frame});
  for (auto& reply : cloud_->handle_or_error(frame)) {
    transcript_.push_back({Direction::CloudToClient, reply});
    inbox_.push_back(std::move(reply));
  }
}

wire::Frame LoopbackTransport::receive() {
  if (inbox_.empty()) throw ProtocolError("no message pending from the cloud");
  wire::Frame f = std::move(inbox_.front());
  inbox_.pop_front();
  return f;
}

std::vector<std::string> run_ot_fetch(ClientSession& session, Transport& transport,
                                      RandomSource& rng) {
  if (!session.has_ot_a()) session.receive_ot_a(transport.receive());
  transport.send(session.ot_choose(rng));
  return session.ot_finish(transport.receive());
}

QueryResult run_query(const UnitVector& query, const ClientConfig& config, Transport& transport,
                      RandomSource& rng) {
  auto [session, messages] = ClientSession::open(query, config, rng);
  for (const auto& m : messages) transport.send(m);
  QueryResult result;
  if (config.mode == Mode::PrivacyIgnorant) {
    result.documents = session.receive_documents(transport.receive());
  } else {
    const std::vector<std::uint32_t> positions = session.rank(transport.receive());
    if (session.plan().route == Route::Direct) {
      transport.send(session.fetch_direct(positions));
      result.documents = session.receive_documents(transport.receive());
    } else {
      result.documents = run_ot_fetch(session, transport, rng);
    }
  }
  result.positions = session.ranked_positions();
  result.plan = session.plan();
  result.costs = session.cost_report();
  result.client_timings = session.timings();
  return result;
}

std::vector<std::string> audit_transcript(std::span<const TranscriptEntry> transcript,
                                          const RetrievalPlan& plan, const UnitVector& query) {
  std::vector<std::string> violations;
  auto flag = [&](std::size_t i, const std::string& what) {
    violations.push_back("message " + std::to_string(i) + ": " + what);
  };
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    const auto& entry = transcript[i];
    if (entry.direction != Direction::ClientToCloud) continue;
    const wire::Frame& f = entry.frame;
    try {
      switch (f.tag) {
        case wire::Tag::InfoRequest:
          if (!f.payload.empty()) flag(i, "INFO_REQUEST with payload");
          break;
        case wire::Tag::Phase1: {
          const wire::Phase1 m = wire::decode_phase1(f);
          if (m.mode != plan.mode) flag(i, "mode differs from plan");
          if (m.k != plan.k) flag(i, "k differs from plan");
          if (m.k_prime != plan.k_prime) flag(i, "k' differs from plan");
          if (m.n != query.dimension()) flag(i, "dimension differs from query");
          if (m.embedding) {
            if (plan.mode == Mode::PrivacyConscious) flag(i, "embedding sent in conscious mode");
            if (plan.mode == Mode::Standard) {
              const double angle = angle_between(*m.embedding, query.values());
              if (!(angle > 0.0)) flag(i, "plaintext query embedding sent");
              if (std::abs(angle - plan.realized_delta_alpha) > 1e-9) {
                flag(i, "embedding is not the planned perturbation");
              }
            }
          }
          if (m.he_modulus && plan.mode == Mode::PrivacyIgnorant) {
            flag(i, "ciphertexts in ignorant mode");
          }
          const bool wants_ot = (m.flags & wire::flags::kStartOt) != 0;
          if (wants_ot != (plan.route == Route::ObliviousTransfer && plan.mode != Mode::PrivacyIgnorant)) {
            flag(i, "OT flag inconsistent with route");
          }
          if ((m.flags & ~(wire::flags::kStartOt | wire::flags::kSeparateA)) != 0) {
            flag(i, "unknown flag bits");
          }
          break;
        }
        case wire::Tag::FetchDirect: {
          if (plan.route != Route::Direct || plan.mode == Mode::PrivacyIgnorant) {
            flag(i, "plaintext positions sent off the direct route");
          }
          const wire::FetchDirect m = wire::decode_fetch_direct(f);
          if (m.positions.size() != plan.k) flag(i, "position count differs from k");
          std::set<std::uint32_t> seen;
          for (std::uint32_t p : m.positions) {
            if (p < 1 || p > plan.k_prime) flag(i, "position outside [1, k']");
            if (!seen.insert(p).second) flag(i, "duplicate position");
          }
          break;
        }
        case wire::Tag::OtB: {
          if (plan.route != Route::ObliviousTransfer) flag(i, "OT values off the OT route");
          const wire::OtB m = wire::decode_ot_b(f);
          if (m.values.size() != plan.k_prime) flag(i, "OT value count differs from k'");
          break;
        }
        default:
          flag(i, std::string("non-whitelisted message ") + wire::to_string(f.tag));
      }
    } catch (const std::exception& e) {
      flag(i, std::string("undecodable: ") + e.what());
    }
  }
  return violations;
}

}  // namespace prk::protocol
