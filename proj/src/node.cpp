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

#include "medledger/node.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "medledger/error.hpp"

namespace medledger {
namespace {

constexpr const char* kBlockLog = "blocks.log";
constexpr const char* kIdentities = "identities.tsv";
constexpr const char* kBlobs = "blobs";
constexpr const char* kConfig = "config.txt";
constexpr const char* kKeys = "keys";
constexpr const char* kLock = "LOCK";
constexpr const char* kScratchMarker = ".scratch";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_psc_mutation(const Transaction& tx) {
  return tx.contract == ContractId::PSC && !contracts::is_query(tx.contract, tx.method);
}

}  // namespace

void NetworkConfig::validate() const {
  if (peer_count < 1) throw Error(Errc::ConfigError, "peer_count must be >= 1");
  ordering.validate();
}

NetworkConfig NetworkConfig::parse(std::string_view text) {
  NetworkConfig cfg;
  cfg.ordering = OrderingConfig::parse(text);
  bool node_count_given = false;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "peer_count") {
      int v = 0;
      try {
        v = std::stoi(std::string(value));
      } catch (const std::exception&) {
        throw Error(Errc::ConfigError, "peer_count: expected an integer");
      }
      if (v < 1) throw Error(Errc::ConfigError, "peer_count must be >= 1");
      cfg.peer_count = static_cast<unsigned>(v);
    } else if (key == "genesis_contracts") {
      cfg.genesis_contracts.clear();
      std::string_view list = value;
      while (!list.empty()) {
        auto comma = list.find(',');
        auto name = trim(list.substr(0, comma));
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        auto id = parse_contract(name);
        if (!id) throw Error(Errc::ConfigError, "unknown contract '" + std::string(name) + "'");
        cfg.genesis_contracts.push_back(*id);
      }
    } else if (key == "durable") {
      if (value != "0" && value != "1") throw Error(Errc::ConfigError, "durable must be 0 or 1");
      cfg.durable = value == "1";
    } else if (key == "node_count") {
      node_count_given = true;
    } else if (key != "backend" && key != "max_txs_per_block" && key != "batch_timeout_ms" &&
               key != "pow_difficulty_bits") {
      throw Error(Errc::ConfigError, "unknown config key '" + std::string(key) + "'");
    }
  }
  if (!node_count_given) cfg.ordering.node_count = std::min(cfg.peer_count, 100u);
  cfg.validate();
  return cfg;
}

std::string NetworkConfig::to_text() const {
  std::string out = ordering.to_text();
  out += "peer_count = " + std::to_string(peer_count) + "\n";
  out += "genesis_contracts = ";
  for (std::size_t i = 0; i < genesis_contracts.size(); ++i) {
    if (i) out += ",";
    out += contract_name(genesis_contracts[i]);
  }
  out += "\ndurable = " + std::string(durable ? "1" : "0") + "\n";
  return out;
}

Node::Node(std::filesystem::path dir, NetworkConfig config, NodeOptions options)
    : dir_(std::move(dir)), config_(std::move(config)), clock_(std::move(options.clock)) {
  std::filesystem::create_directories(dir_);
  lock_fd_ = ::open((dir_ / kLock).c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0 || ::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    throw Error(Errc::ConfigError, "data directory " + dir_.string() + " is in use");
  }
  if (options.scratch) std::ofstream(dir_ / kScratchMarker) << "disposable\n";
}

Node::~Node() {
  try {
    shutdown();
  } catch (...) {
  }
  orderer_.reset();
  ledger_.reset();
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::unique_ptr<Node> Node::bootstrap(const std::filesystem::path& data_dir,
                                      const NetworkConfig& config, NodeOptions options) {
  config.validate();
  auto log = data_dir / kBlockLog;
  if (std::filesystem::exists(log) && std::filesystem::file_size(log) > 0) {
    throw Error(Errc::ConfigError, "data directory " + data_dir.string() +
                                       " already holds a chain; open it instead");
  }
  std::unique_ptr<Node> node(new Node(data_dir, config, std::move(options)));
  {
    std::ofstream out(data_dir / kConfig, std::ios::binary | std::ios::trunc);
    out << config.to_text();
    if (!out.flush()) throw Error(Errc::Io, "cannot write config.txt");
  }
  std::filesystem::remove(data_dir / kIdentities);
  node->start(true);
  return node;
}

std::unique_ptr<Node> Node::open(const std::filesystem::path& data_dir, NodeOptions options) {
  if (!std::filesystem::exists(data_dir / kBlockLog)) {
    throw Error(Errc::ConfigError, "no chain in " + data_dir.string() + "; run init first");
  }
  auto config = NetworkConfig::parse(read_text(data_dir / kConfig));
  std::unique_ptr<Node> node(new Node(data_dir, config, std::move(options)));
  node->start(false);
  return node;
}

void Node::start(bool fresh) {
  if (!fresh) {
    ca_.load(dir_ / kIdentities);
  }
  wallet_ = std::make_unique<Wallet>(dir_ / kKeys);
  store_ = std::make_unique<ContentStore>(dir_ / kBlobs, config_.durable);
  host_ = std::make_unique<contracts::ContractHost>(ca_);
  ledger_ = std::make_unique<Ledger>(dir_ / kBlockLog, *host_, config_.durable);

  if (fresh) {
    Identity admin = register_identity(std::string(kBootstrapAdmin), Role::admin, "it");
    Block genesis;
    genesis.height = 0;
    genesis.timestamp = clock_();
    for (ContractId c : config_.genesis_contracts) {
      genesis.txs.push_back(make_transaction(admin, TxKind::deploy, c, "Init", {}, genesis.timestamp,
                                             crypto::random_u64()));
    }
    genesis.seal();
    for (const auto& outcome : ledger_->append_block(genesis)) {
      if (!outcome.result.ok()) {
        throw Error(Errc::ConfigError, "genesis deployment failed: " + outcome.result.message);
      }
    }
  }

  const Ledger* ledger = ledger_.get();
  orderer_ = std::make_unique<OrderingService>(
      config_.ordering, ChainTip{ledger_->block_count(), ledger_->tip_hash()},
      [this](const Block& b) { commit(b); }, clock_,
      [ledger](const Hash& id) { return ledger->contains_tx(id); });
}

Identity Node::register_identity(const std::string& user_id, Role role,
                                 const std::string& department) {
  std::lock_guard lock(registry_mu_);
  Identity id = ca_.register_identity(user_id, role, department, clock_());
  wallet_->store(id);
  CertificateAuthority::append_record(dir_ / kIdentities, id);
  return id;
}

std::optional<Identity> Node::local_identity(const std::string& user_id) const {
  auto cert = ca_.lookup(user_id);
  if (!cert) return std::nullopt;
  return wallet_->unlock(*cert);
}

SignedEnvelope Node::make_request(const Identity& client, ContractId contract, std::string method,
                                  std::vector<Bytes> args, TxKind kind) const {
  return make_transaction(client, kind, contract, std::move(method), std::move(args), clock_(),
                          crypto::random_u64())
      .envelope;
}

ContractResult Node::submit_invoke(const SignedEnvelope& request) {
  try {
    if (!ca_.verify(request)) return ContractResult::failure(Errc::AuthFailed, "bad signature");
  } catch (const Error& e) {
    return ContractResult::failure(Errc::AuthFailed, e.what());
  }
  Transaction tx;
  try {
    tx = Transaction::from_envelope(request);
  } catch (const Error& e) {
    return ContractResult::failure(Errc::InvalidArgument, e.what());
  }
  if (tx.submitter != request.signer) {
    return ContractResult::failure(Errc::AuthFailed, "submitter does not match signer");
  }
  auto submitter = ca_.lookup(tx.submitter);
  const bool admin = submitter && submitter->role == Role::admin;
  if ((tx.kind == TxKind::deploy || is_psc_mutation(tx)) && !admin) {
    return ContractResult::failure(Errc::AuthFailed, "'" + tx.submitter + "' may not modify policies");
  }
  if (tx.contract == ContractId::ASC && tx.method == "CheckAccess" && !admin) {
    // The subject attributes must be the requester's own certificate.
    try {
      auto req = abac::parse_request_text(to_string(tx.args.at(0)));
      if (req.subject.user_id != submitter->user_id || req.subject.role != submitter->role ||
          req.subject.department != submitter->department) {
        return ContractResult::failure(Errc::AuthFailed, "request attributes do not match the requester");
      }
    } catch (const std::exception& e) {
      return ContractResult::failure(Errc::InvalidArgument, e.what());
    }
  }
  if (tx.contract == ContractId::RSC && (tx.method == "AddRecord" || tx.method == "UpdateRecord")) {
    auto address = tx.args.size() > 1 ? ContentAddress::parse(to_string(tx.args[1])) : std::nullopt;
    if (!address) return ContractResult::failure(Errc::InvalidArgument, "malformed content address");
    if (!store_->contains(*address)) {
      return ContractResult::failure(Errc::StoreError, "content " + address->text() + " was not uploaded");
    }
  }

  // Endorsement: execute against the committed state; the write set is
  // discarded and re-derived at commit.
  TxOutcome endorsed = ledger_->with_state(
      [&](const WorldState& ws) { return host_->execute(tx, ws, clock_()); });
  if (contracts::is_query(tx.contract, tx.method)) return resolve_query(tx, std::move(endorsed.result));
  if (endorsed.writes.empty()) return std::move(endorsed.result);
  return order(std::move(tx));
}

ContractResult Node::resolve_query(const Transaction& tx, ContractResult on_chain) {
  if (!on_chain.ok() || tx.contract != ContractId::RSC || tx.method != "QueryRecord") return on_chain;
  auto address = ContentAddress::parse(to_string(on_chain.payload));
  if (!address) return ContractResult::failure(Errc::Internal, "malformed pointer on chain");
  try {
    return ContractResult::success(address->text(), store_->get(*address));
  } catch (const Error& e) {
    return ContractResult::failure(e.code(), e.what());
  }
}

ContractResult Node::order(Transaction tx) {
  std::string key(tx.tx_id.begin(), tx.tx_id.end());
  std::future<ContractResult> done;
  {
    std::lock_guard lock(waiters_mu_);
    auto [it, inserted] = waiters_.try_emplace(key);
    if (!inserted) return ContractResult::failure(Errc::Duplicate, "transaction already pending");
    done = it->second.get_future();
  }
  try {
    orderer_->submit(std::move(tx));
  } catch (const Error& e) {
    std::lock_guard lock(waiters_mu_);
    waiters_.erase(key);
    return ContractResult::failure(e.code(), e.what());
  }
  return done.get();
}

void Node::commit(const Block& block) {
  std::vector<TxOutcome> outcomes;
  std::string failure;
  try {
    outcomes = ledger_->append_block(block);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  for (const auto& outcome : outcomes) {
    for (const auto& blob : outcome.released_blobs) {
      try {
        store_->remove(blob);
      } catch (const Error&) {
        // Already gone; the pointer is what matters.
      }
    }
  }
  std::lock_guard lock(waiters_mu_);
  for (std::size_t i = 0; i < block.txs.size(); ++i) {
    auto it = waiters_.find(std::string(block.txs[i].tx_id.begin(), block.txs[i].tx_id.end()));
    if (it == waiters_.end()) continue;
    it->second.set_value(failure.empty() ? outcomes[i].result
                                         : ContractResult::failure(Errc::Internal, "commit failed: " + failure));
    waiters_.erase(it);
  }
}

ContractResult Node::invoke(const Identity& client, ContractId contract, std::string method,
                            std::vector<Bytes> args) {
  return submit_invoke(make_request(client, contract, std::move(method), std::move(args)));
}

ContractResult Node::add_record(const Identity& client, const std::string& record_id,
                                ByteView content) {
  ContentAddress address = store_->put(content);
  return invoke(client, ContractId::RSC, "AddRecord", {to_bytes(record_id), to_bytes(address.text())});
}

ContractResult Node::update_record(const Identity& client, const std::string& record_id,
                                   ByteView content) {
  ContentAddress address = store_->put(content);
  return invoke(client, ContractId::RSC, "UpdateRecord",
                {to_bytes(record_id), to_bytes(address.text())});
}

ContractResult Node::access_record(const Identity& client, const abac::AccessRequest& request) {
  auto check = invoke(client, ContractId::ASC, "CheckAccess", {to_bytes(abac::to_text(request))});
  if (!check.ok()) return check;
  auto record = invoke(client, ContractId::RSC, "QueryRecord", {to_bytes(request.object.record_id)});
  if (!record.ok()) return record;
  return ContractResult::success(check.message, std::move(record.payload));
}

bool Node::verify_chain() const {
  return ledger_->verify_chain([this](const SignedEnvelope& env) { return ca_.verify(env); });
}

bool Node::is_scratch() const { return std::filesystem::exists(dir_ / kScratchMarker); }

void Node::shutdown() {
  if (orderer_) orderer_->close();
}

}  // namespace medledger
