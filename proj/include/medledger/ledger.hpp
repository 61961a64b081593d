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

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "medledger/bytes.hpp"
#include "medledger/content_store.hpp"
#include "medledger/membership.hpp"
#include "medledger/result.hpp"

namespace medledger {

enum class TxKind : std::uint8_t { deploy = 0, invoke = 1 };
enum class ContractId : std::uint8_t { PSC = 0, ASC = 1, RSC = 2 };

std::string_view contract_name(ContractId id);
std::optional<ContractId> parse_contract(std::string_view name);

/// A contract invocation as recorded on chain.
///
/// The submitter signs the canonical payload, so the envelope payload *is*
/// the canonical payload and tx_id = SHA256(envelope payload). Only the
/// envelope is serialised; the other fields are decoded from it.
struct Transaction {
  Hash tx_id{};
  TxKind kind = TxKind::invoke;
  ContractId contract = ContractId::PSC;
  std::string method;
  std::vector<Bytes> args;
  std::string submitter;
  std::int64_t timestamp = 0;
  /// Client-chosen, keeps identical requests in the same second distinct.
  std::uint64_t nonce = 0;
  SignedEnvelope envelope;

  Bytes canonical_payload() const;
  Hash compute_id() const { return crypto::sha256(canonical_payload()); }

  /// Decodes a signed request into a transaction. Throws Error(ParseError).
  static Transaction from_envelope(SignedEnvelope envelope);

  /// tx_id, payload and signer are mutually consistent.
  bool well_formed() const;
};

/// Builds, signs and identifies a transaction in one step.
Transaction make_transaction(const Identity& submitter, TxKind kind, ContractId contract,
                             std::string method, std::vector<Bytes> args, std::int64_t timestamp,
                             std::uint64_t nonce);

struct Block {
  std::uint64_t height = 0;
  Hash prev_hash{};
  std::int64_t timestamp = 0;
  std::vector<Transaction> txs;
  /// Zero for blocks from the leader-log backend.
  std::uint8_t pow_bits = 0;
  std::uint64_t nonce = 0;
  Hash block_hash{};

  /// height ++ prev_hash ++ timestamp ++ concatenated tx_ids.
  Bytes header() const;
  /// SHA256(header) for leader-log blocks; SHA256(header ++ pow_bits ++ nonce)
  /// for proof-of-work blocks, which makes the block hash the work hash.
  Hash compute_hash() const;
  bool meets_difficulty() const;
  void seal() { block_hash = compute_hash(); }

  Bytes serialize() const;
  static Block deserialize(ByteView bytes);
};

struct Version {
  std::uint64_t height = 0;
  std::uint32_t tx_index = 0;

  friend auto operator<=>(const Version&, const Version&) = default;
};

struct StateEntry {
  std::string key;
  Bytes value;
  Version version;
  bool deleted = false;
};

struct HistoryEntry {
  Version version;
  Bytes value;
  bool deleted = false;
  Hash tx_id{};
};

/// Buffered writes of one transaction; nullopt marks a delete. Later writes
/// to the same key replace earlier ones.
using WriteSet = std::map<std::string, std::optional<Bytes>>;

/// Latest value per key plus the full per-key write history.
class WorldState {
 public:
  /// Includes tombstones.
  const StateEntry* find(const std::string& key) const;
  std::optional<Bytes> get(const std::string& key) const;
  const std::vector<HistoryEntry>& history(const std::string& key) const;

  void apply(const WriteSet& writes, Version version, const Hash& tx_id);

  /// Canonical dump of every entry in key order, tombstones included.
  Bytes serialize() const;
  std::size_t live_keys() const;

 private:
  std::map<std::string, StateEntry> entries_;
  std::unordered_map<std::string, std::vector<HistoryEntry>> history_;
};

/// Transaction execution context handed to contracts: reads see committed
/// state overlaid with this transaction's own buffered writes.
class TxContext {
 public:
  explicit TxContext(const WorldState& committed) : committed_(committed) {}

  /// Throws Error(KeyNotFound) for absent or deleted keys.
  Bytes get_state(const std::string& key) const;
  std::optional<Bytes> find_state(const std::string& key) const;
  void put_state(const std::string& key, Bytes value);
  void delete_state(const std::string& key);

  const WriteSet& writes() const { return writes_; }
  WriteSet take_writes() { return std::move(writes_); }

 private:
  const WorldState& committed_;
  WriteSet writes_;
};

struct TxOutcome {
  Hash tx_id{};
  ContractResult result;
  WriteSet writes;
  /// Blobs to drop from the content store once the block is durable.
  std::vector<ContentAddress> released_blobs;
};

/// Deterministic state transition for one transaction. Implementations must
/// depend only on (tx, state, block_time).
class TxExecutor {
 public:
  virtual ~TxExecutor() = default;
  virtual TxOutcome execute(const Transaction& tx, const WorldState& state,
                            std::int64_t block_time) = 0;
};

using SignatureCheck = std::function<bool(const SignedEnvelope&)>;

/// Append-only block log with the world state derived from it.
///
/// One writer calls append_block(); readers go through the const accessors,
/// which see the state as of the last committed block.
class Ledger {
 public:
  /// Opens the log at `log_path`, creating it if missing, and replays every
  /// block through `executor`. An empty path keeps the chain in memory only.
  /// Throws Error(InvalidBlock) or Error(ChainMismatch) on a damaged log.
  Ledger(std::filesystem::path log_path, TxExecutor& executor, bool durable = false);
  ~Ledger();
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  /// Validates `block` against the tip, executes its transactions in order,
  /// persists it and applies the write sets.
  std::vector<TxOutcome> append_block(const Block& block);

  std::size_t block_count() const;
  /// Hash of the last block, or 32 zero bytes for an empty chain.
  Hash tip_hash() const;
  std::optional<Block> block(std::uint64_t height) const;
  bool contains_tx(const Hash& tx_id) const;

  std::optional<Bytes> get_state(const std::string& key) const;
  std::optional<StateEntry> get_entry(const std::string& key) const;
  std::vector<HistoryEntry> get_history(const std::string& key) const;
  Bytes state_snapshot() const;

  /// Runs `fn(const WorldState&)` under the shared state lock.
  template <typename Fn>
  decltype(auto) with_state(Fn&& fn) const {
    std::shared_lock lock(mu_);
    return fn(state_);
  }

  /// Re-reads the persisted log and checks framing, hash links, tx ids and
  /// (when `check` is given) every signature. In-memory ledgers check their
  /// retained blocks instead.
  bool verify_chain(const SignatureCheck& check = {}) const;

  /// Same checks on an arbitrary log file.
  static bool verify_log(const std::filesystem::path& log_path, const SignatureCheck& check = {});

  const std::filesystem::path& log_path() const { return path_; }

 private:
  std::vector<TxOutcome> apply_locked(const Block& block);
  void validate_locked(const Block& block) const;

  std::filesystem::path path_;
  TxExecutor& executor_;
  bool durable_;
  int fd_ = -1;

  mutable std::shared_mutex mu_;
  std::vector<Block> blocks_;
  std::unordered_set<std::string> tx_ids_;
  WorldState state_;
};

/// Reads every framed record of a block log. Throws Error(InvalidBlock) on a
/// torn or malformed record.
std::vector<Block> read_block_log(const std::filesystem::path& log_path);

}  // namespace medledger
