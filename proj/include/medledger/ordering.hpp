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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "medledger/ledger.hpp"

namespace medledger {

enum class Backend { kafka_style, pow };

std::string_view backend_name(Backend b);
std::optional<Backend> parse_backend(std::string_view text);

struct OrderingConfig {
  Backend backend = Backend::kafka_style;
  std::size_t max_txs_per_block = 10;
  std::chrono::milliseconds batch_timeout{250};
  unsigned pow_difficulty_bits = 16;
  unsigned node_count = 4;

  /// Throws Error(ConfigError).
  void validate() const;

  /// `key = value` lines: backend, max_txs_per_block, batch_timeout_ms,
  /// pow_difficulty_bits, node_count. Keys not listed here are ignored so
  /// the same file can carry settings for other components.
  static OrderingConfig parse(std::string_view text);
  std::string to_text() const;
};

/// Leader-to-follower replication delay: one broadcast round in which every
/// follower acknowledges after an independent uniform [1, 5] ms delay. The
/// round ends with the slowest acknowledgement.
class ReplicationModel {
 public:
  ReplicationModel(unsigned followers, std::uint64_t seed);

  /// Draws one round without sleeping.
  std::chrono::microseconds draw_round();
  /// Draws a round and blocks for its duration.
  std::chrono::microseconds broadcast();

  unsigned followers() const { return followers_; }

 private:
  unsigned followers_;
  std::mt19937_64 rng_;
};

/// Where the next block attaches.
struct ChainTip {
  std::uint64_t height = 0;
  Hash prev_hash{};
};

/// Leader-log cut: keeps arrival order and replicates to the followers
/// before returning the sealed block.
Block cut_block_kafka(std::vector<Transaction> pending, const ChainTip& tip,
                      std::int64_t timestamp, ReplicationModel& replication);

struct PowBlock {
  Block block;
  std::uint64_t attempts = 0;
};

/// Searches nonces from zero until the block hash has at least
/// `difficulty_bits` leading zero bits.
PowBlock cut_block_pow(std::vector<Transaction> pending, const ChainTip& tip,
                       std::int64_t timestamp, unsigned difficulty_bits);

using Clock = std::function<std::int64_t()>;

/// Wall-clock seconds since the Unix epoch.
std::int64_t system_seconds();

/// Single ordering context that batches submitted transactions into blocks
/// and hands each block to `sink` (the committer) before cutting the next.
/// A block is cut when `max_txs_per_block` transactions are pending or
/// `batch_timeout` has passed since the first of them arrived.
class OrderingService {
 public:
  using Sink = std::function<void(const Block&)>;
  using CommittedCheck = std::function<bool(const Hash&)>;

  struct BlockStats {
    std::uint64_t height = 0;
    std::size_t tx_count = 0;
    /// Cut start to sink return.
    double commit_millis = 0;
    std::uint64_t pow_attempts = 0;
  };

  OrderingService(OrderingConfig config, ChainTip tip, Sink sink, Clock clock = system_seconds,
                  CommittedCheck already_committed = {}, std::uint64_t seed = std::random_device{}());
  ~OrderingService();
  OrderingService(const OrderingService&) = delete;
  OrderingService& operator=(const OrderingService&) = delete;

  /// Throws Error(Duplicate) for a tx_id seen before and Error(QueueClosed)
  /// after close().
  void submit(Transaction tx);

  /// Cuts whatever is pending, then stops the ordering thread.
  void close();

  std::vector<BlockStats> stats() const;
  const OrderingConfig& config() const { return config_; }

 private:
  void run();
  void cut(std::vector<Transaction> batch);

  OrderingConfig config_;
  ChainTip tip_;
  Sink sink_;
  Clock clock_;
  CommittedCheck already_committed_;
  ReplicationModel replication_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Transaction> pending_;
  std::chrono::steady_clock::time_point batch_started_;
  std::unordered_set<std::string> seen_;
  bool closed_ = false;
  std::vector<BlockStats> stats_;
  std::thread worker_;
};

struct ConsensusSample {
  Backend backend = Backend::kafka_style;
  unsigned node_count = 0;
  unsigned round = 0;
  double millis = 0;
  std::uint64_t pow_attempts = 0;
};

struct ConsensusSummary {
  unsigned node_count = 0;
  double mean_millis = 0;
};

/// 10, 20, ..., 100.
std::vector<unsigned> default_node_counts();

/// Times `rounds` full-block commits per node count under `config.backend`:
/// from cut start until the block is appended to a scratch ledger.
std::vector<ConsensusSample> measure_consensus_samples(
    const OrderingConfig& config, unsigned rounds,
    const std::vector<unsigned>& node_counts = default_node_counts(), std::uint64_t seed = 1);

std::vector<ConsensusSummary> summarize(const std::vector<ConsensusSample>& samples);

std::vector<ConsensusSummary> measure_consensus(const OrderingConfig& config, unsigned rounds);

/// `backend,node_count,round,millis` with a header row.
void write_consensus_csv(std::ostream& out, const std::vector<ConsensusSample>& samples);

}  // namespace medledger
