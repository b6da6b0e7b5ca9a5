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

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prk/bench.hpp"
#include "prk/bigint.hpp"
#include "prk/dp_perturbation.hpp"
#include "prk/errors.hpp"
#include "prk/paillier.hpp"
#include "prk/protocol.hpp"
#include "prk/transport.hpp"
#include "prk/vector_store.hpp"

namespace {

using json = nlohmann::json;
using namespace prk;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<double> read_embedding(const std::string& path) {
  const json doc = read_json(path);
  const json& arr = doc.is_object() && doc.contains("embedding") ? doc["embedding"] : doc;
  if (!arr.is_array()) throw ConfigError(path + ": expected a JSON array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(path + ": embedding entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::shared_ptr<const he::KeyPair> read_keys(const std::string& path) {
  const json doc = read_json(path);
  try {
    return std::make_shared<const he::KeyPair>(he::keypair_from_primes(
        bigint::from_hex(doc.at("p").get<std::string>()), bigint::from_hex(doc.at("q").get<std::string>())));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

protocol::Mode parse_mode(const std::string& s) {
  if (s == "standard") return protocol::Mode::Standard;
  if (s == "ignorant") return protocol::Mode::PrivacyIgnorant;
  return protocol::Mode::PrivacyConscious;
}

int cmd_serve(const std::string& store_path, const std::string& listen) {
  const store::Store data = store::load_store(store_path);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  net::serve(data, net::Endpoint::parse(listen), g_stop, [&](std::uint16_t port) {
    std::cerr << "serving " << data.size() << " documents (n = " << data.dimension() << ") on port "
              << port << std::endl;
  });
  return 0;
}

int cmd_ingest(const std::string& in_path, const std::string& out_path, const std::string& format) {
  const store::Store data = store::load_store(in_path);
  if (format == "jsonl") {
    auto out = open_out(out_path);
    store::write_jsonl(data, out);
  } else {
    auto out = open_out(out_path, true);
    store::write_binary(data, out);
  }
  std::cerr << "wrote " << data.size() << " records to " << out_path << '\n';
  return 0;
}

int cmd_keygen(unsigned bits, const std::string& out_path) {
  RandomSource rng = RandomSource::from_env();
  const he::KeyPair keys = he::keygen(bits, rng, bits < 2048);
  json doc = {{"bits", bits},
              {"n", bigint::to_hex(keys.pub.modulus)},
              {"p", bigint::to_hex(keys.sec.p)},
              {"q", bigint::to_hex(keys.sec.q)}};
  auto out = open_out(out_path);
  out << doc.dump(2) << '\n';
  return 0;
}

struct QueryOptions {
  std::string addr;
  std::string embedding;
  std::uint64_t k = 5;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> k_prime;
  std::string mode = "standard";
  bool report_costs = false;
  std::string key_path;
  unsigned bits = 2048;
  std::string route = "auto";
  bool unmerged = false;
  std::string ot_group = "modp2048";
};

int cmd_query(const QueryOptions& o) {
  RandomSource rng = RandomSource::from_env();
  const UnitVector query = UnitVector::normalize(read_embedding(o.embedding));

  protocol::ClientConfig config;
  config.k = o.k;
  config.mode = parse_mode(o.mode);
  config.merge_rounds = !o.unmerged;
  if (config.mode == protocol::Mode::Standard) {
    config.epsilon = o.epsilon;
    config.k_prime_target = o.k_prime;
    if (o.route == "direct") config.force_route = Route::Direct;
    if (o.route == "ot") config.force_route = Route::ObliviousTransfer;
  }
  config.ot_group = o.ot_group == "test256" ? ot::GroupId::Test256 : ot::GroupId::Modp2048;
  if (config.mode != protocol::Mode::PrivacyIgnorant) {
    config.keys = o.key_path.empty()
                      ? std::make_shared<const he::KeyPair>(he::keygen(o.bits, rng, o.bits < 2048))
                      : read_keys(o.key_path);
  }

  net::TcpTransport link(net::Endpoint::parse(o.addr));
  link.send(wire::info_request());
  const wire::Info info = wire::decode_info(link.receive());
  if (info.dimension != query.dimension()) {
    throw ConfigError("server dimension " + std::to_string(info.dimension) +
                      " differs from query dimension " + std::to_string(query.dimension()));
  }
  config.corpus_size = info.corpus_size;
  if (config.epsilon) {
    if (auto warning = dp::epsilon_guidance(static_cast<int>(query.dimension()),
                                            dp::PrivacyBudget::of(*config.epsilon))) {
      std::cerr << "warning: " << *warning << '\n';
    }
  }

  const protocol::QueryResult result = protocol::run_query(query, config, link, rng);
  json out = {{"route", to_string(result.plan.route)},
              {"k", result.plan.k},
              {"k_prime", result.plan.k_prime},
              {"positions", result.positions},
              {"documents", result.documents}};
  if (o.report_costs) {
    out["costs"] = {{"rounds", result.costs.rounds},
                    {"beta_units", result.costs.beta_units},
                    {"eta_units", result.costs.eta_units},
                    {"bytes_by_phase", result.costs.bytes_by_phase},
                    {"total_bytes", result.costs.total_bytes()},
                    {"client_seconds", result.client_timings}};
    if (config.mode == protocol::Mode::Standard) {
      out["costs"]["realized_delta_alpha"] = result.plan.realized_delta_alpha;
      out["costs"]["alpha_k"] = result.plan.alpha_k;
      out["costs"]["omega"] = result.plan.omega;
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_bench(const std::string& kind, const std::string& config_path, const std::string& out_path,
              const std::string& curve, const std::string& embeddings) {
  bench::ExperimentConfig config = bench::ExperimentConfig::load(config_path);
  if (!embeddings.empty()) config.embeddings = embeddings;
  auto out = open_out(out_path);
  if (kind == "recall") {
    const bench::RecallResult result = bench::recall_experiment(config);
    bench::write_recall_csv(result, out);
    std::cerr << "mean recall " << result.mean_recall() << ", full-recall trials "
              << result.full_recall_fraction() * 100.0 << "%\n";
  } else if (kind == "curves") {
    bench::emit_curves(bench::parse_curve_kind(curve), config, out);
  } else {
    bench::write_pipeline_csv(bench::bench_pipeline(config), out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private nearest-neighbour retrieval: client, server and experiments"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Serve a document store over TCP");
  std::string store_path, listen;
  serve->add_option("--store", store_path, "Store file (binary or JSONL)")->required();
  serve->add_option("--listen", listen, "host:port to bind")->required();

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and write it as a store");
  std::string in_path, out_path, format = "bin";
  ingest->add_option("--in", in_path, "JSONL or binary input")->required();
  ingest->add_option("--out", out_path, "Output file")->required();
  ingest->add_option("--format", format, "Output format")->check(CLI::IsMember({"jsonl", "bin"}));

  auto* keygen = app.add_subcommand("keygen", "Generate a Paillier key pair");
  unsigned key_bits = 2048;
  std::string key_out;
  keygen->add_option("--bits", key_bits, "Modulus size")->check(CLI::IsMember({1024, 2048, 3072}));
  keygen->add_option("--out", key_out, "Output JSON file")->required();

  auto* query = app.add_subcommand("query", "Run one private retrieval against a server");
  QueryOptions q;
  query->add_option("--addr", q.addr, "Server host:port")->required();
  query->add_option("--embedding", q.embedding, "JSON array with the query embedding")->required();
  query->add_option("--k", q.k, "Number of documents")->required()->check(CLI::PositiveNumber);
  auto* eps = query->add_option("--epsilon", q.epsilon, "Privacy budget");
  auto* kp = query->add_option("--k-prime", q.k_prime, "Target candidate range size");
  eps->excludes(kp);
  kp->excludes(eps);
  query->add_option("--mode", q.mode)->check(CLI::IsMember({"standard", "ignorant", "conscious"}));
  query->add_flag("--report-costs", q.report_costs, "Print round, unit and byte counts");
  query->add_option("--key", q.key_path, "Key file from keygen (default: fresh key)");
  query->add_option("--bits", q.bits, "Fresh key size")->check(CLI::IsMember({1024, 2048, 3072}));
  query->add_option("--route", q.route, "Override the fetch route")
      ->check(CLI::IsMember({"auto", "direct", "ot"}));
  query->add_flag("--unmerged", q.unmerged, "Send module messages separately");
  query->add_option("--ot-group", q.ot_group)->check(CLI::IsMember({"modp2048", "test256"}));

  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment and write CSV");
  std::string bench_kind, config_path, bench_out, curve = "gamma_pdf", embeddings;
  bench_cmd->add_option("kind", bench_kind, "recall | curves | pipeline")
      ->required()
      ->check(CLI::IsMember({"recall", "curves", "pipeline"}));
  bench_cmd->add_option("--config", config_path, "key=value experiment file")->required();
  bench_cmd->add_option("--out", bench_out, "CSV output")->required();
  bench_cmd->add_option("--curve", curve, "Curve for 'curves'")
      ->check(CLI::IsMember({"gamma_pdf", "epsilon_kprime", "k_over_n_alpha"}));
  bench_cmd->add_option("--embeddings", embeddings, "Real corpus instead of a synthetic one");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(store_path, listen);
    if (*ingest) return cmd_ingest(in_path, out_path, format);
    if (*keygen) return cmd_keygen(key_bits, key_out);
    if (*query) {
      if (q.mode == "standard" && !q.epsilon && !q.k_prime) {
        std::cerr << "error: standard mode needs --epsilon or --k-prime\n";
        return 2;
      }
      return cmd_query(q);
    }
    return cmd_bench(bench_kind, config_path, bench_out, curve, embeddings);
  } catch (const IngestError& e) {
    std::cerr << "ingest error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
