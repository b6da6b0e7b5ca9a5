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

#include "prk/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "prk/dp_perturbation.hpp"
#include "prk/errors.hpp"
#include "prk/sphere_geometry.hpp"

namespace prk::bench {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

protocol::Mode parse_mode(const std::string& value) {
  if (value == "standard") return protocol::Mode::Standard;
  if (value == "ignorant") return protocol::Mode::PrivacyIgnorant;
  if (value == "conscious") return protocol::Mode::PrivacyConscious;
  throw ConfigError("unknown mode '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + value + "'");
}

std::shared_ptr<const he::KeyPair> make_keys(const ExperimentConfig& config, RandomSource& rng) {
  return std::make_shared<const he::KeyPair>(
      he::keygen(config.key_bits, rng, config.key_bits < 2048));
}

protocol::ClientConfig client_config(const ExperimentConfig& config, std::uint64_t corpus_size,
                                     std::shared_ptr<const he::KeyPair> keys) {
  protocol::ClientConfig c;
  c.k = config.k;
  c.mode = config.mode;
  c.merge_rounds = config.merge_rounds;
  c.safety = config.safety;
  c.corpus_size = corpus_size;
  c.keys = std::move(keys);
  c.ot_group = config.ot_group;
  if (config.mode == protocol::Mode::Standard) {
    if (config.epsilon) c.epsilon = *config.epsilon;
    if (config.r) c.epsilon = config.n / *config.r;
    if (config.k_prime) c.k_prime_target = *config.k_prime;
  }
  return c;
}

const store::Store& corpus_for(const ExperimentConfig& config, const store::Store* given,
                               store::Store& owned) {
  if (given != nullptr) return *given;
  owned = config.embeddings ? store::load_store(*config.embeddings)
                            : gen_uniform_corpus(config.N, config.n, config.seed);
  if (owned.dimension() != config.n) {
    throw ConfigError("corpus dimension " + std::to_string(owned.dimension()) +
                      " differs from n = " + std::to_string(config.n));
  }
  return owned;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (N < 1) throw ConfigError("N must be >= 1");
  if (n < 2) throw ConfigError("n must be >= 2");
  if (k < 1 || k > N) throw ConfigError("k must lie in [1, N]");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  const int set = int{epsilon.has_value()} + int{r.has_value()} + int{k_prime.has_value()};
  if (mode == protocol::Mode::Standard && set != 1) {
    throw ConfigError("standard mode needs exactly one of epsilon, r, k_prime");
  }
  if (set > 1) throw ConfigError("at most one of epsilon, r, k_prime may be set");
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (r && !(*r > 0.0)) throw ConfigError("r must be > 0");
  if (k_prime && (*k_prime <= k || *k_prime > N)) throw ConfigError("k_prime must lie in (k, N]");
  if (!(safety >= 0.0)) throw ConfigError("safety must be >= 0");
  for (std::uint64_t kp : k_prime_grid) {
    if (kp < k) throw ConfigError("k_prime_grid entries must be >= k");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::set<std::string> seen;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key " + key);
    if (key == "N") c.N = parse_number<std::uint64_t>(key, value);
    else if (key == "n") c.n = parse_number<int>(key, value);
    else if (key == "k") c.k = parse_number<std::uint64_t>(key, value);
    else if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
    else if (key == "r") c.r = parse_number<double>(key, value);
    else if (key == "k_prime") c.k_prime = parse_number<std::uint64_t>(key, value);
    else if (key == "trials") c.trials = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "mode") c.mode = parse_mode(value);
    else if (key == "safety") c.safety = parse_number<double>(key, value);
    else if (key == "key_bits") c.key_bits = parse_number<unsigned>(key, value);
    else if (key == "merge_rounds") c.merge_rounds = parse_bool(key, value);
    else if (key == "embeddings") c.embeddings = value;
    else if (key == "repeats") c.repeats = parse_number<unsigned>(key, value);
    else if (key == "ot_group") {
      if (value == "modp2048") c.ot_group = ot::GroupId::Modp2048;
      else if (value == "test256") c.ot_group = ot::GroupId::Test256;
      else throw ConfigError("unknown ot_group '" + value + "'");
    } else if (key == "k_prime_grid") {
      c.k_prime_grid.clear();
      std::istringstream items(value);
      for (std::string item; std::getline(items, item, ',');) {
        c.k_prime_grid.push_back(parse_number<std::uint64_t>(key, trim(item)));
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse(in);
}

store::Store gen_uniform_corpus(std::uint64_t N, int n, std::uint64_t seed) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (n < 2) throw DomainError("n must be >= 2");
  RandomSource rng(seed);
  std::vector<store::RawRecord> records;
  records.reserve(N);
  for (std::uint64_t id = 1; id <= N; ++id) {
    const UnitVector v = dp::sample_direction(n, rng);
    records.push_back({id, std::vector<double>(v.values().begin(), v.values().end()),
                       "doc " + std::to_string(id)});
  }
  return store::Store::ingest(std::move(records));
}

double RecallResult::mean_recall() const {
  if (trials.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : trials) sum += t.recall;
  return sum / static_cast<double>(trials.size());
}

double RecallResult::full_recall_fraction() const {
  if (trials.empty()) return 0.0;
  const auto full = std::count_if(trials.begin(), trials.end(),
                                  [](const TrialOutcome& t) { return t.recall == 1.0; });
  return static_cast<double>(full) / static_cast<double>(trials.size());
}

RecallResult recall_experiment(const ExperimentConfig& config, const store::Store* corpus,
                               std::shared_ptr<const he::KeyPair> keys) {
  config.validate();
  store::Store owned;
  const store::Store& data = corpus_for(config, corpus, owned);
  RandomSource master(config.seed);
  RandomSource key_rng = master.derive(0);
  if (!keys && config.mode != protocol::Mode::PrivacyIgnorant) keys = make_keys(config, key_rng);
  const protocol::ClientConfig client = client_config(config, data.size(), keys);

  RecallResult result;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    RandomSource rng = master.derive(t + 1);
    const UnitVector query = dp::sample_direction(data.dimension(), rng);
    protocol::CloudSession cloud(data, rng.derive(1));
    protocol::LoopbackTransport link(cloud);
    const protocol::QueryResult q = protocol::run_query(query, client, link, rng);

    const store::CandidateSet truth = data.top_k(query.values(), config.k);
    std::vector<std::uint64_t> returned;
    for (std::uint32_t p : q.positions) returned.push_back(cloud.candidates().at(p - 1).id);
    std::set<std::uint64_t> candidate_ids;
    for (const auto& c : cloud.candidates()) candidate_ids.insert(c.id);

    TrialOutcome out;
    out.k_prime = q.plan.k_prime;
    out.route = q.plan.route;
    std::size_t hits = 0;
    out.included = true;
    for (const auto& c : truth) {
      if (std::find(returned.begin(), returned.end(), c.id) != returned.end()) ++hits;
      if (!candidate_ids.contains(c.id)) out.included = false;
    }
    out.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    out.exact = returned.size() == truth.size() &&
                std::equal(returned.begin(), returned.end(), truth.begin(),
                           [](std::uint64_t id, const store::Candidate& c) { return id == c.id; });
    out.audit_violations = protocol::audit_transcript(link.transcript(), q.plan, query).size();
    result.trials.push_back(out);
  }
  return result;
}

void write_recall_csv(const RecallResult& result, std::ostream& out) {
  out << "trial,k_prime,route,recall,included,exact\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    out << i + 1 << ',' << t.k_prime << ',' << to_string(t.route) << ',' << t.recall << ','
        << int{t.included} << ',' << int{t.exact} << '\n';
  }
}

CurveKind parse_curve_kind(const std::string& name) {
  if (name == "gamma_pdf") return CurveKind::GammaPdf;
  if (name == "epsilon_kprime") return CurveKind::EpsilonKprime;
  if (name == "k_over_n_alpha") return CurveKind::KOverNAlpha;
  throw ConfigError("unknown curve '" + name + "'");
}

void emit_curves(CurveKind kind, const ExperimentConfig& config, std::ostream& out) {
  const int n = config.n;
  const auto old_precision = out.precision(10);
  switch (kind) {
    case CurveKind::GammaPdf: {
      const double eps = config.epsilon.value_or(10.0 * n);
      out << "r,density\n";
      constexpr int kSteps = 160;
      for (int i = 0; i <= kSteps; ++i) {
        const double r = 0.06 + (0.14 - 0.06) * i / kSteps;
        out << r << ',' << dp::gamma_pdf(r, n, eps) << '\n';
      }
      break;
    }
    case CurveKind::EpsilonKprime: {
      const auto params = sphere::SphereParams::make(n, config.N);
      out << "k,epsilon,k_prime\n";
      constexpr int kSteps = 60;
      for (std::uint64_t k : {5u, 10u, 20u}) {
        if (k > config.N) continue;
        for (int i = 0; i <= kSteps; ++i) {
          // Geometric grid over [5n, 100n].
          const double eps = 5.0 * n * std::pow(20.0, static_cast<double>(i) / kSteps);
          const double delta = std::min(n / eps, std::numbers::pi);
          out << k << ',' << eps << ','
              << sphere::expanded_k_prime(params, k, PolarAngle::radians(delta), config.safety)
              << '\n';
        }
      }
      break;
    }
    case CurveKind::KOverNAlpha: {
      out << "alpha,k_over_N\n";
      constexpr int kSteps = 180;
      for (int i = 0; i <= kSteps; ++i) {
        const double alpha = std::numbers::pi * i / kSteps;
        out << alpha << ',' << sphere::cap_fraction(n, PolarAngle::radians(alpha)) << '\n';
      }
      break;
    }
  }
  out.precision(old_precision);
}

double PipelineMeasurement::total_seconds() const {
  double sum = 0.0;
  for (const auto& [phase, s] : seconds) sum += s;
  return sum;
}

double PipelineMeasurement::encrypted_distance_seconds() const {
  double sum = 0.0;
  for (const char* phase : {"encrypt_query", "encrypted_distance", "decrypt_rank"}) {
    const auto it = seconds.find(phase);
    if (it != seconds.end()) sum += it->second;
  }
  return sum;
}

std::vector<PipelineMeasurement> bench_pipeline(const ExperimentConfig& config,
                                                const store::Store* corpus,
                                                std::shared_ptr<const he::KeyPair> keys) {
  config.validate();
  store::Store owned;
  const store::Store& data = corpus_for(config, corpus, owned);
  RandomSource master(config.seed);
  RandomSource key_rng = master.derive(0);
  if (!keys) keys = make_keys(config, key_rng);

  ExperimentConfig standard = config;
  standard.mode = protocol::Mode::Standard;
  if (!standard.epsilon && !standard.r) {
    standard.k_prime.reset();
    standard.epsilon = 20.0 * config.n;
  }
  protocol::ClientConfig client = client_config(standard, data.size(), keys);

  std::vector<PipelineMeasurement> rows;
  std::uint64_t stream = 1;
  for (std::uint64_t kp : config.k_prime_grid) {
    if (kp > data.size()) throw ConfigError("k_prime_grid entry exceeds the corpus size");
    for (Route route : {Route::Direct, Route::ObliviousTransfer}) {
      client.fixed_k_prime = kp;
      client.force_route = route;
      PipelineMeasurement m;
      m.k_prime = kp;
      m.route = route;
      for (unsigned rep = 0; rep < config.repeats; ++rep) {
        RandomSource rng = master.derive(stream++);
        const UnitVector query = dp::sample_direction(data.dimension(), rng);
        protocol::CloudSession cloud(data, rng.derive(1));
        protocol::LoopbackTransport link(cloud);
        const protocol::QueryResult q = protocol::run_query(query, client, link, rng);
        protocol::PhaseTimes times = q.client_timings;
        for (const auto& [phase, s] : cloud.timings()) times[phase] += s;
        for (const auto& [phase, s] : times) {
          auto [it, fresh] = m.seconds.emplace(phase, s);
          if (!fresh) it->second = std::min(it->second, s);
        }
        m.costs = q.costs;
      }
      rows.push_back(std::move(m));
    }
  }
  return rows;
}

void write_pipeline_csv(const std::vector<PipelineMeasurement>& rows, std::ostream& out) {
  out << "k_prime,route,phase,seconds,bytes\n";
  for (const auto& m : rows) {
    const char* route = to_string(m.route);
    for (const auto& [phase, s] : m.seconds) {
      out << m.k_prime << ',' << route << ',' << phase << ',' << s << ",\n";
    }
    for (const auto& [phase, b] : m.costs.bytes_by_phase) {
      out << m.k_prime << ',' << route << ',' << phase << ",," << b << '\n';
    }
    out << m.k_prime << ',' << route << ",total," << m.total_seconds() << ','
        << m.costs.total_bytes() << '\n';
  }
}

}  // namespace prk::bench
