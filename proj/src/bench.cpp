// Copyright 2026 The medledger Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "medledger/bench.hpp"

#include <algorithm>
#include <chrono>
#include <latch>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "medledger/error.hpp"

namespace medledger::bench {
namespace {

using SteadyClock = std::chrono::steady_clock;

constexpr std::int64_t kDay = 86400;

struct ClientTally {
  std::uint64_t ok = 0;
  std::uint64_t err = 0;
  double latency_ms = 0;
};

class Harness {
 public:
  Harness(const LoadProfile& profile, Node& node) : profile_(profile), node_(node) {
    auto admin = node.local_identity(std::string(Node::kBootstrapAdmin));
    if (!admin) throw Error(Errc::ConfigError, "scratch node has no local administrator key");
    admin_ = *admin;
    unsigned most = *std::max_element(profile.client_counts.begin(), profile.client_counts.end());
    clients_.reserve(most);
    for (unsigned i = 0; i < most; ++i) {
      std::string id = "vc-" + std::to_string(i);
      auto existing = node.local_identity(id);
      clients_.push_back(existing ? *existing : node.register_identity(id, Role::doctor, "bench"));
    }
  }

  std::vector<LoadRow> run() {
    std::vector<LoadRow> rows;
    auto has = [&](Op op) {
      return std::find(profile_.ops.begin(), profile_.ops.end(), op) != profile_.ops.end();
    };
    for (unsigned c : profile_.client_counts) {
      bool policies_live = false;
      auto need_policies = [&] {
        if (!policies_live) cell(Op::PscAdd, c);
        policies_live = true;
      };
      if (has(Op::PscAdd)) {
        rows.push_back(cell(Op::PscAdd, c));
        policies_live = true;
      }
      for (Op op : {Op::PscQuery, Op::AscCheck, Op::PscUpdate, Op::PscDelete}) {
        if (!has(op)) continue;
        need_policies();
        rows.push_back(cell(op, c));
      }

      bool records_live = false;
      if (has(Op::RscAdd)) {
        rows.push_back(cell(Op::RscAdd, c));
        records_live = true;
      }
      for (Op op : {Op::RscQuery, Op::RscUpdate, Op::RscDelete}) {
        if (!has(op)) continue;
        if (!records_live) cell(Op::RscAdd, c);
        records_live = true;
        rows.push_back(cell(op, c));
      }
    }
    return rows;
  }

 private:
  std::string target(const char* prefix, unsigned clients, unsigned client, unsigned k) const {
    return std::string(prefix) + "-" + std::to_string(clients) + "-" + std::to_string(client) + "-" +
           std::to_string(k);
  }

  abac::SubjectAttrs subject(unsigned client) const {
    return {clients_[client].user_id, clients_[client].role, clients_[client].department};
  }

  abac::PolicyDraft policy(unsigned clients, unsigned client, unsigned k, std::int64_t lifetime) const {
    const std::int64_t now = node_.now();
    return {subject(client), abac::ObjectAttrs{target("psc", clients, client, k)},
            abac::PermissionAttr{1}, abac::EnvironmentAttrs{now, now + lifetime}};
  }

  Bytes content(const std::string& record_id, std::uint64_t salt) const {
    std::mt19937_64 rng(salt);
    Bytes out = to_bytes(record_id + "\n");
    while (out.size() < profile_.payload_bytes) out.push_back(static_cast<std::uint8_t>(rng()));
    out.resize(std::max(profile_.payload_bytes, out.size()));
    return out;
  }

  ContractResult request(Op op, unsigned clients, unsigned client, unsigned k) {
    const Identity& vc = clients_[client];
    switch (op) {
      case Op::PscAdd:
        return node_.invoke(admin_, ContractId::PSC, "AddPolicy",
                            {to_bytes(abac::to_text(policy(clients, client, k, kDay)))});
      case Op::PscUpdate:
        return node_.invoke(admin_, ContractId::PSC, "UpdatePolicy",
                            {to_bytes(abac::to_text(policy(clients, client, k, 2 * kDay)))});
      case Op::PscQuery:
      case Op::PscDelete: {
        auto key = abac::key_text(subject(client), {target("psc", clients, client, k)});
        return node_.invoke(admin_, ContractId::PSC, op == Op::PscQuery ? "QueryPolicy" : "DeletePolicy",
                            {to_bytes(key)});
      }
      case Op::AscCheck: {
        abac::AccessRequest req{subject(client), {target("psc", clients, client, k)}, node_.now()};
        return node_.invoke(vc, ContractId::ASC, "CheckAccess", {to_bytes(abac::to_text(req))});
      }
      case Op::RscAdd: {
        auto id = target("rsc", clients, client, k);
        return node_.add_record(vc, id, content(id, 1));
      }
      case Op::RscUpdate: {
        auto id = target("rsc", clients, client, k);
        return node_.update_record(vc, id, content(id, 2));
      }
      case Op::RscQuery:
        return node_.invoke(vc, ContractId::RSC, "QueryRecord",
                            {to_bytes(target("rsc", clients, client, k))});
      case Op::RscDelete:
        return node_.invoke(vc, ContractId::RSC, "DeleteRecord",
                            {to_bytes(target("rsc", clients, client, k))});
    }
    return ContractResult::failure(Errc::Internal, "unhandled op");
  }

  LoadRow cell(Op op, unsigned clients) {
    std::vector<ClientTally> tallies(clients);
    std::latch go(1);
    std::vector<std::thread> threads;
    threads.reserve(clients);
    for (unsigned i = 0; i < clients; ++i) {
      threads.emplace_back([&, i] {
        go.wait();
        ClientTally& t = tallies[i];
        for (unsigned k = 0; k < profile_.ops_per_client; ++k) {
          const auto start = SteadyClock::now();
          ContractResult r;
          try {
            r = request(op, clients, i, k);
          } catch (const std::exception& e) {
            r = ContractResult::failure(Errc::Internal, e.what());
          }
          t.latency_ms += std::chrono::duration<double, std::milli>(SteadyClock::now() - start).count();
          (r.ok() ? t.ok : t.err) += 1;
        }
      });
    }
    const auto start = SteadyClock::now();
    go.count_down();
    for (auto& th : threads) th.join();
    const double total_ms = std::chrono::duration<double, std::milli>(SteadyClock::now() - start).count();

    LoadRow row;
    row.op = op;
    row.clients = clients;
    row.total_ms = total_ms;
    double latency = 0;
    for (const auto& t : tallies) {
      row.ok_count += t.ok;
      row.err_count += t.err;
      latency += t.latency_ms;
    }
    const std::uint64_t issued = std::uint64_t{clients} * profile_.ops_per_client;
    if (row.ok_count + row.err_count != issued) {
      throw Error(Errc::Internal, "load accounting mismatch in " + std::string(op_name(op)));
    }
    row.tps = total_ms > 0 ? static_cast<double>(row.ok_count) * 1000.0 / total_ms : 0;
    row.mean_latency_ms = issued ? latency / static_cast<double>(issued) : 0;
    return row;
  }

  const LoadProfile& profile_;
  Node& node_;
  Identity admin_;
  std::vector<Identity> clients_;
};

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::PscAdd: return "PSC.Add";
    case Op::PscUpdate: return "PSC.Update";
    case Op::PscQuery: return "PSC.Query";
    case Op::PscDelete: return "PSC.Delete";
    case Op::RscAdd: return "RSC.Add";
    case Op::RscUpdate: return "RSC.Update";
    case Op::RscQuery: return "RSC.Query";
    case Op::RscDelete: return "RSC.Delete";
    case Op::AscCheck: return "ASC.Check";
  }
  return "?";
}

std::vector<Op> all_ops() {
  return {Op::PscAdd, Op::PscUpdate, Op::PscQuery, Op::PscDelete, Op::RscAdd,
          Op::RscUpdate, Op::RscQuery, Op::RscDelete, Op::AscCheck};
}

std::optional<Op> parse_op(std::string_view name) {
  for (Op op : all_ops()) {
    if (op_name(op) == name) return op;
  }
  return std::nullopt;
}

void LoadProfile::validate() const {
  if (client_counts.empty()) throw Error(Errc::ConfigError, "client_counts must not be empty");
  for (std::size_t i = 0; i < client_counts.size(); ++i) {
    if (client_counts[i] == 0) throw Error(Errc::ConfigError, "client counts must be positive");
    if (i > 0 && client_counts[i] <= client_counts[i - 1]) {
      throw Error(Errc::ConfigError, "client_counts must be strictly ascending");
    }
  }
  if (ops.empty()) throw Error(Errc::ConfigError, "no operations selected");
  if (ops_per_client == 0) throw Error(Errc::ConfigError, "ops_per_client must be >= 1");
}

LoadProfile LoadProfile::parse(std::string_view text) {
  LoadProfile p;
  std::istringstream in{std::string(text)};
  std::string line;
  auto trim = [](std::string v) {
    auto b = v.find_first_not_of(" \t\r");
    auto e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
  };
  auto split = [&](const std::string& v) {
    std::vector<std::string> items;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item = trim(item); !item.empty()) items.push_back(item);
    }
    return items;
  };
  auto number = [](const std::string& key, const std::string& v) -> unsigned long long {
    try {
      std::size_t used = 0;
      auto n = std::stoull(v, &used);
      if (used == v.size() && v.find('-') == std::string::npos) return n;
    } catch (const std::exception&) {
    }
    throw Error(Errc::ConfigError, key + ": not a non-negative integer: '" + v + "'");
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::ConfigError, "expected key = value: '" + line + "'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "client_counts") {
      p.client_counts.clear();
      for (const auto& n : split(value)) p.client_counts.push_back(static_cast<unsigned>(number(key, n)));
    } else if (key == "ops") {
      p.ops.clear();
      for (const auto& name : split(value)) {
        auto op = parse_op(name);
        if (!op) throw Error(Errc::ConfigError, "unknown op '" + name + "'");
        p.ops.push_back(*op);
      }
    } else if (key == "ops_per_client") {
      p.ops_per_client = static_cast<unsigned>(number(key, value));
    } else if (key == "payload_bytes") {
      p.payload_bytes = number(key, value);
    } else {
      throw Error(Errc::ConfigError, "unknown load profile key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

std::unique_ptr<Node> make_scratch_node(const std::filesystem::path& dir, const NetworkConfig& config) {
  NodeOptions options;
  options.scratch = true;
  return Node::bootstrap(dir, config, options);
}

std::vector<LoadRow> run_load(const LoadProfile& profile, Node& node) {
  profile.validate();
  if (!node.is_scratch()) {
    throw Error(Errc::ConfigError, "refusing to load-test non-scratch data directory " +
                                       node.data_dir().string());
  }
  return Harness(profile, node).run();
}

void write_load_csv(std::ostream& out, const std::vector<LoadRow>& rows) {
  out << "op,clients,total_ms,ok_count,err_count,tps\n";
  for (const auto& r : rows) {
    out << op_name(r.op) << ',' << r.clients << ',' << r.total_ms << ',' << r.ok_count << ','
        << r.err_count << ',' << r.tps << '\n';
  }
}

ConsensusComparison run_consensus_compare(unsigned rounds, const OrderingConfig& base) {
  ConsensusComparison cmp;
  for (Backend backend : {Backend::kafka_style, Backend::pow}) {
    OrderingConfig cfg = base;
    cfg.backend = backend;
    auto samples = measure_consensus_samples(cfg, rounds);
    (backend == Backend::pow ? cmp.pow : cmp.kafka) = summarize(samples);
    cmp.samples.insert(cmp.samples.end(), samples.begin(), samples.end());
  }
  return cmp;
}

void write_consensus_compare_csv(std::ostream& out, const ConsensusComparison& cmp) {
  write_consensus_csv(out, cmp.samples);
}

void write_gnuplot_data(std::ostream& out, const ConsensusComparison& cmp) {
  out << "# node_count kafka_style_mean_ms pow_mean_ms\n";
  std::map<unsigned, std::pair<double, double>> by_nodes;
  for (const auto& s : cmp.kafka) by_nodes[s.node_count].first = s.mean_millis;
  for (const auto& s : cmp.pow) by_nodes[s.node_count].second = s.mean_millis;
  for (const auto& [nodes, means] : by_nodes) {
    out << nodes << ' ' << means.first << ' ' << means.second << '\n';
  }
}

}  // namespace medledger::bench
