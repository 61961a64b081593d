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

#pragma once

#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "medledger/abac.hpp"
#include "medledger/content_store.hpp"
#include "medledger/contracts.hpp"
#include "medledger/ledger.hpp"
#include "medledger/membership.hpp"
#include "medledger/ordering.hpp"

namespace medledger {

struct NetworkConfig {
  unsigned peer_count = 4;
  OrderingConfig ordering;
  std::vector<ContractId> genesis_contracts{ContractId::PSC, ContractId::ASC, ContractId::RSC};
  /// fsync blocks and blobs before acknowledging.
  bool durable = false;

  /// Throws Error(ConfigError).
  void validate() const;

  /// Ordering keys plus peer_count, genesis_contracts (comma list) and
  /// durable (0/1). node_count defaults to peer_count when absent.
  static NetworkConfig parse(std::string_view text);
  std::string to_text() const;
};

struct NodeOptions {
  Clock clock = system_seconds;
  /// Marks the data directory as disposable (required by the load harness).
  bool scratch = false;
};

/// In-process peer: membership, contracts, ordering and ledger wired into
/// one request pipeline.
///
/// Data directory layout:
///   blocks.log      framed block records
///   identities.tsv  registered certificates
///   blobs/          content store
///   config.txt      NetworkConfig text
///   keys/           signing seeds of locally held identities
///
/// submit_invoke() may be called from many threads. Mutations are ordered
/// and committed before it returns; queries run against the committed state
/// without ordering.
class Node {
 public:
  /// Name of the administrator created at bootstrap.
  static constexpr std::string_view kBootstrapAdmin = "admin";

  /// Initialises a fresh data directory: config, bootstrap administrator,
  /// genesis block deploying the configured contracts. Throws
  /// Error(ConfigError) if the directory already holds a chain; use open().
  static std::unique_ptr<Node> bootstrap(const std::filesystem::path& data_dir,
                                         const NetworkConfig& config, NodeOptions options = {});

  /// Resumes from an existing data directory, replaying the block log.
  static std::unique_ptr<Node> open(const std::filesystem::path& data_dir, NodeOptions options = {});

  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  Identity register_identity(const std::string& user_id, Role role, const std::string& department);
  /// Identity with its signing key from the local wallet.
  std::optional<Identity> local_identity(const std::string& user_id) const;

  /// Builds a signed request stamped with the node clock and a random nonce.
  SignedEnvelope make_request(const Identity& client, ContractId contract, std::string method,
                              std::vector<Bytes> args, TxKind kind = TxKind::invoke) const;

  ContractResult submit_invoke(const SignedEnvelope& request);

  // Client conveniences composing make_request + submit_invoke.
  ContractResult invoke(const Identity& client, ContractId contract, std::string method,
                        std::vector<Bytes> args);
  /// Uploads content to the store, then submits the pointer.
  ContractResult add_record(const Identity& client, const std::string& record_id, ByteView content);
  ContractResult update_record(const Identity& client, const std::string& record_id,
                               ByteView content);
  /// Access check followed by retrieval; the payload carries the record
  /// bytes. A refused request never reaches the content store.
  ContractResult access_record(const Identity& client, const abac::AccessRequest& request);

  /// Full chain check including every transaction signature.
  bool verify_chain() const;

  const Ledger& ledger() const { return *ledger_; }
  ContentStore& store() { return *store_; }
  const ContentStore& store() const { return *store_; }
  const CertificateAuthority& ca() const { return ca_; }
  const NetworkConfig& config() const { return config_; }
  const std::filesystem::path& data_dir() const { return dir_; }
  bool is_scratch() const;
  std::int64_t now() const { return clock_(); }
  std::vector<OrderingService::BlockStats> ordering_stats() const { return orderer_->stats(); }

  /// Drains the ordering queue and stops accepting mutations.
  void shutdown();

 private:
  Node(std::filesystem::path dir, NetworkConfig config, NodeOptions options);
  void start(bool fresh);
  void commit(const Block& block);
  ContractResult order(Transaction tx);
  ContractResult resolve_query(const Transaction& tx, ContractResult on_chain);

  std::filesystem::path dir_;
  NetworkConfig config_;
  Clock clock_;
  int lock_fd_ = -1;

  CertificateAuthority ca_;
  std::unique_ptr<Wallet> wallet_;
  std::unique_ptr<ContentStore> store_;
  std::unique_ptr<contracts::ContractHost> host_;
  std::unique_ptr<Ledger> ledger_;
  std::unique_ptr<OrderingService> orderer_;

  std::mutex registry_mu_;
  std::mutex waiters_mu_;
  std::unordered_map<std::string, std::promise<ContractResult>> waiters_;
};

}  // namespace medledger
