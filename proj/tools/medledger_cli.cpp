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

// medledger: command-line client for a local medledger node.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "medledger/medledger.h"

namespace {

struct Globals {
  std::string data_dir = "medledger-data";
  std::string identity;
  std::string output = "text";
};

// Thrown to unwind with the exit code of a failed API call.
struct Failed {
  ml_status status;
};

class Buffer {
 public:
  Buffer() = default;
  ~Buffer() { ml_buffer_free(&buf_); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  ml_buffer* get() { return &buf_; }
  std::string str() const {
    return buf_.data ? std::string(reinterpret_cast<const char*>(buf_.data), buf_.len) : std::string();
  }

 private:
  ml_buffer buf_{nullptr, 0};
};

void check(ml_status s) {
  if (s == ML_OK) return;
  std::cerr << ml_status_name(s);
  if (const char* msg = ml_last_error(); msg && *msg && std::string(msg) != ml_status_name(s)) {
    std::cerr << ": " << msg;
  }
  std::cerr << '\n';
  throw Failed{s};
}

class Session {
 public:
  explicit Session(const std::string& dir) { check(ml_node_open(dir.c_str(), &node_)); }
  ~Session() { ml_node_close(node_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ml_node* get() const { return node_; }

 private:
  ml_node* node_ = nullptr;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "Io: cannot read " << path << '\n';
    throw Failed{ML_IO};
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    std::cerr << "Io: cannot write " << path << '\n';
    throw Failed{ML_IO};
  }
}

std::string join_lines(const std::vector<std::string>& pairs) {
  std::string text;
  for (const auto& p : pairs) text += p + "\n";
  return text;
}

std::string policy_text(const std::vector<std::string>& pairs, const std::string& file) {
  return file.empty() ? join_lines(pairs) : read_file(file);
}

std::string request_text(const std::string& user, const std::string& role, const std::string& dept,
                         const std::string& record) {
  return "userId=" + user + "\nrole=" + role + "\ndepartment=" + dept + "\nrecordId=" + record + "\n";
}

// Prints `op,clients,...` CSV as-is or as an aligned table.
void print_table(const std::string& csv, const std::string& format) {
  if (format == "csv") {
    std::cout << csv;
    return;
  }
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    bool first = true;
    while (std::getline(cells, cell, ',')) {
      std::cout << (first ? "" : "  ") << std::left << std::setw(first ? 12 : 10) << cell;
      first = false;
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medledger: permissioned ledger for medical records with attribute-based access"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--data-dir", g.data_dir, "Node data directory")
      ->envname("MEDLEDGER_DATA_DIR")
      ->capture_default_str();
  app.add_option("--identity", g.identity, "Signing identity (key must be in the local wallet)");
  app.add_option("--output", g.output, "Output format")->check(CLI::IsMember({"text", "csv"}));

  // init
  auto* init = app.add_subcommand("init", "Create a data directory with a genesis block");
  std::string config_file;
  std::vector<std::string> config_sets;
  init->add_option("--config", config_file, "Network config file (key = value lines)")
      ->check(CLI::ExistingFile);
  init->add_option("--set", config_sets, "Config override, key=value (repeatable)");

  // id
  auto* id = app.add_subcommand("id", "Identities")->require_subcommand(1);
  auto* id_register = id->add_subcommand("register", "Issue a certificate and key");
  std::string reg_user, reg_role, reg_dept;
  id_register->add_option("user", reg_user)->required();
  id_register->add_option("role", reg_role)->required()->check(
      CLI::IsMember({"admin", "doctor", "patient"}));
  id_register->add_option("department", reg_dept)->required();

  // policy
  auto* policy = app.add_subcommand("policy", "Access policies (administrators only)")
                     ->require_subcommand(1);
  std::vector<std::string> policy_pairs;
  std::string policy_file;
  std::vector<CLI::App*> policy_cmds;
  for (const char* name : {"add", "update", "delete", "query"}) {
    auto* c = policy->add_subcommand(name);
    c->add_option("fields", policy_pairs, "key=value attributes");
    c->add_option("--file", policy_file, "Read attributes from a file")->check(CLI::ExistingFile);
    policy_cmds.push_back(c);
  }
  policy_cmds[0]->description("Add a policy");
  policy_cmds[1]->description("Replace the permission and environment of a policy");
  policy_cmds[2]->description("Delete a policy");
  policy_cmds[3]->description("Print a stored policy");

  // record
  auto* record = app.add_subcommand("record", "Medical records")->require_subcommand(1);
  std::string record_id, record_file, record_out;
  auto* record_add = record->add_subcommand("add", "Store content and anchor its address");
  auto* record_update = record->add_subcommand("update", "Replace a record's content");
  for (auto* c : {record_add, record_update}) {
    c->add_option("record_id", record_id)->required();
    c->add_option("file", record_file)->required()->check(CLI::ExistingFile);
  }
  auto* record_delete = record->add_subcommand("delete", "Remove a record");
  auto* record_query = record->add_subcommand("query", "Fetch a record's content");
  for (auto* c : {record_delete, record_query}) c->add_option("record_id", record_id)->required();
  record_query->add_option("--out", record_out, "Write content to a file instead of stdout");

  // access
  auto* access = app.add_subcommand("access", "Access control")->require_subcommand(1);
  auto* access_check = access->add_subcommand("check", "Evaluate a request; with --out also fetch");
  std::string acc_user, acc_role, acc_dept, acc_record, acc_out;
  access_check->add_option("user", acc_user)->required();
  access_check->add_option("role", acc_role)->required();
  access_check->add_option("department", acc_dept)->required();
  access_check->add_option("record_id", acc_record)->required();
  access_check->add_option("--out", acc_out, "Write the record content to a file");

  // ledger
  auto* ledger = app.add_subcommand("ledger", "Chain inspection")->require_subcommand(1);
  auto* ledger_verify = ledger->add_subcommand("verify", "Check hashes, links and signatures");
  auto* ledger_height = ledger->add_subcommand("height", "Print the number of blocks");
  auto* ledger_history = ledger->add_subcommand("history", "Print every committed version of a key");
  std::string hist_key, hist_record;
  std::vector<std::string> hist_policy;
  auto* hk = ledger_history->add_option("--key", hist_key, "Raw world-state key");
  auto* hr = ledger_history->add_option("--record", hist_record, "Record id");
  auto* hp = ledger_history->add_option("--policy", hist_policy, "Policy key=value attributes");
  hk->excludes(hr)->excludes(hp);
  hr->excludes(hp);

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmarks")->require_subcommand(1);
  auto* bench_load = bench->add_subcommand("load", "Concurrent client load against a scratch node");
  std::string scratch_dir, load_clients, load_ops, load_csv;
  unsigned ops_per_client = 10;
  std::size_t payload_bytes = 1024;
  bench_load->add_option("--scratch", scratch_dir, "Fresh directory for the scratch node")->required();
  bench_load->add_option("--clients", load_clients, "Client counts, comma separated");
  bench_load->add_option("--ops", load_ops, "Operations, e.g. PSC.Add,RSC.Query");
  bench_load->add_option("--ops-per-client", ops_per_client)->capture_default_str();
  bench_load->add_option("--payload-bytes", payload_bytes)->capture_default_str();
  bench_load->add_option("--csv", load_csv, "Also write the rows to this file");
  bench_load->add_option("--config", config_file, "Network config file")->check(CLI::ExistingFile);
  auto* bench_cons = bench->add_subcommand("consensus", "Ordering latency by node count");
  unsigned rounds = 10;
  std::string cons_csv, cons_dat;
  bench_cons->add_option("--rounds", rounds)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cons->add_option("--csv", cons_csv, "Per-round samples");
  bench_cons->add_option("--dat", cons_dat, "Per-count means for gnuplot");
  bench_cons->add_option("--config", config_file, "Network config file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  auto signer = [&](const std::string& fallback) {
    return g.identity.empty() ? fallback : g.identity;
  };
  const std::string admin = "admin";

  try {
    if (*init) {
      std::string cfg = config_file.empty() ? std::string() : read_file(config_file);
      for (const auto& s : config_sets) {
        auto eq = s.find('=');
        cfg += (eq == std::string::npos ? s : s.substr(0, eq) + " = " + s.substr(eq + 1)) + "\n";
      }
      ml_node* node = nullptr;
      check(ml_node_init(g.data_dir.c_str(), cfg.c_str(), &node));
      uint64_t height = 0;
      ml_ledger_height(node, &height);
      ml_node_close(node);
      std::cout << "initialised " << g.data_dir << " (" << height << " block, administrator '"
                << admin << "')\n";
    } else if (*id_register) {
      Session s(g.data_dir);
      check(ml_identity_register(s.get(), reg_user.c_str(), reg_role.c_str(), reg_dept.c_str()));
      std::cout << "registered " << reg_user << " as " << reg_role << " in " << reg_dept << '\n';
    } else if (*policy) {
      Session s(g.data_dir);
      const std::string who = signer(admin);
      const std::string text = policy_text(policy_pairs, policy_file);
      if (*policy_cmds[0]) {
        check(ml_policy_add(s.get(), who.c_str(), text.c_str()));
        std::cout << "policy added\n";
      } else if (*policy_cmds[1]) {
        check(ml_policy_update(s.get(), who.c_str(), text.c_str()));
        std::cout << "policy updated\n";
      } else if (*policy_cmds[2]) {
        check(ml_policy_delete(s.get(), who.c_str(), text.c_str()));
        std::cout << "policy deleted\n";
      } else {
        Buffer out;
        check(ml_policy_query(s.get(), who.c_str(), text.c_str(), out.get()));
        std::cout << out.str();
      }
    } else if (*record) {
      Session s(g.data_dir);
      const std::string who = signer(admin);
      if (*record_add || *record_update) {
        std::string data = read_file(record_file);
        auto* bytes = reinterpret_cast<const uint8_t*>(data.data());
        check(*record_add ? ml_record_add(s.get(), who.c_str(), record_id.c_str(), bytes, data.size())
                          : ml_record_update(s.get(), who.c_str(), record_id.c_str(), bytes, data.size()));
        std::cout << "record " << record_id << (*record_add ? " added" : " updated") << '\n';
      } else if (*record_delete) {
        check(ml_record_delete(s.get(), who.c_str(), record_id.c_str()));
        std::cout << "record " << record_id << " deleted\n";
      } else {
        Buffer out;
        check(ml_record_query(s.get(), who.c_str(), record_id.c_str(), out.get()));
        if (record_out.empty()) {
          std::cout << out.str();
        } else {
          write_file(record_out, out.str());
        }
      }
    } else if (*access_check) {
      Session s(g.data_dir);
      const std::string who = signer(acc_user);
      const std::string req = request_text(acc_user, acc_role, acc_dept, acc_record);
      if (acc_out.empty()) {
        Buffer msg;
        check(ml_access_check(s.get(), who.c_str(), req.c_str(), msg.get()));
        std::cout << msg.str() << '\n';
      } else {
        Buffer content;
        check(ml_access_record(s.get(), who.c_str(), req.c_str(), content.get()));
        write_file(acc_out, content.str());
        std::cout << "valid request!\n";
      }
    } else if (*ledger_verify) {
      Session s(g.data_dir);
      int ok = 0;
      check(ml_ledger_verify(s.get(), &ok));
      uint64_t height = 0;
      ml_ledger_height(s.get(), &height);
      if (!ok) {
        std::cerr << "InvalidBlock: chain verification failed\n";
        return 1;
      }
      std::cout << "ok: " << height << " blocks verified\n";
    } else if (*ledger_height) {
      Session s(g.data_dir);
      uint64_t height = 0;
      check(ml_ledger_height(s.get(), &height));
      std::cout << height << '\n';
    } else if (*ledger_history) {
      Buffer key;
      if (!hist_key.empty()) {
        // used as given
      } else if (!hist_record.empty()) {
        check(ml_state_key_record(hist_record.c_str(), key.get()));
        hist_key = key.str();
      } else if (!hist_policy.empty()) {
        check(ml_state_key_policy(join_lines(hist_policy).c_str(), key.get()));
        hist_key = key.str();
      } else {
        std::cerr << "InvalidArgument: one of --key, --record or --policy is required\n";
        return 1;
      }
      Session s(g.data_dir);
      Buffer out;
      check(ml_ledger_history(s.get(), hist_key.c_str(), out.get()));
      std::cout << out.str();
    } else if (*bench_load) {
      std::string profile;
      if (!load_clients.empty()) profile += "client_counts = " + load_clients + "\n";
      if (!load_ops.empty()) profile += "ops = " + load_ops + "\n";
      profile += "ops_per_client = " + std::to_string(ops_per_client) + "\n";
      profile += "payload_bytes = " + std::to_string(payload_bytes) + "\n";
      std::string cfg = config_file.empty() ? std::string() : read_file(config_file);
      Buffer csv;
      check(ml_bench_load(scratch_dir.c_str(), cfg.empty() ? nullptr : cfg.c_str(), profile.c_str(),
                          csv.get()));
      if (!load_csv.empty()) write_file(load_csv, csv.str());
      print_table(csv.str(), g.output);
    } else if (*bench_cons) {
      std::string cfg = config_file.empty() ? std::string() : read_file(config_file);
      Buffer csv, dat;
      check(ml_bench_consensus(rounds, cfg.empty() ? nullptr : cfg.c_str(), csv.get(), dat.get()));
      if (!cons_csv.empty()) write_file(cons_csv, csv.str());
      if (!cons_dat.empty()) write_file(cons_dat, dat.str());
      if (g.output == "csv") {
        std::cout << csv.str();
      } else {
        std::cout << dat.str();
      }
    }
  } catch (const Failed& f) {
    return f.status == ML_OK ? 0 : 1;
  }
  return 0;
}
