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

#include "medledger/ordering.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>

#include "medledger/codec.hpp"
#include "medledger/crypto.hpp"
#include "medledger/error.hpp"

namespace medledger {

std::string_view backend_name(Backend b) {
  return b == Backend::pow ? "pow" : "kafka_style";
}

std::optional<Backend> parse_backend(std::string_view text) {
  if (text == "kafka_style" || text == "kafka") return Backend::kafka_style;
  if (text == "pow") return Backend::pow;
  return std::nullopt;
}

void OrderingConfig::validate() const {
  if (max_txs_per_block < 1) throw Error(Errc::ConfigError, "max_txs_per_block must be >= 1");
  if (pow_difficulty_bits < 1 || pow_difficulty_bits > 32) {
    throw Error(Errc::ConfigError, "pow_difficulty_bits must be in [1, 32]");
  }
  if (node_count < 1 || node_count > 100) throw Error(Errc::ConfigError, "node_count must be in [1, 100]");
  if (batch_timeout.count() < 0) throw Error(Errc::ConfigError, "batch_timeout_ms must be >= 0");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_count(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    throw Error(Errc::ConfigError, std::string(key) + ": expected a non-negative integer, got '" +
                                       std::string(value) + "'");
  }
  return v;
}

}  // namespace

OrderingConfig OrderingConfig::parse(std::string_view text) {
  OrderingConfig cfg;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigError, "expected key = value, got '" + std::string(line) + "'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "backend") {
      auto b = parse_backend(value);
      if (!b) throw Error(Errc::ConfigError, "unknown backend '" + std::string(value) + "'");
      cfg.backend = *b;
    } else if (key == "max_txs_per_block") {
      cfg.max_txs_per_block = parse_count(key, value);
    } else if (key == "batch_timeout_ms") {
      cfg.batch_timeout = std::chrono::milliseconds(parse_count(key, value));
    } else if (key == "pow_difficulty_bits") {
      cfg.pow_difficulty_bits = static_cast<unsigned>(std::min<std::uint64_t>(parse_count(key, value), 1000));
    } else if (key == "node_count") {
      cfg.node_count = static_cast<unsigned>(std::min<std::uint64_t>(parse_count(key, value), 1000));
    }
  }
  cfg.validate();
  return cfg;
}

std::string OrderingConfig::to_text() const {
  std::string out;
  out += "backend = " + std::string(backend_name(backend)) + "\n";
  out += "max_txs_per_block = " + std::to_string(max_txs_per_block) + "\n";
  out += "batch_timeout_ms = " + std::to_string(batch_timeout.count()) + "\n";
  out += "pow_difficulty_bits = " + std::to_string(pow_difficulty_bits) + "\n";
  out += "node_count = " + std::to_string(node_count) + "\n";
  return out;
}

ReplicationModel::ReplicationModel(unsigned followers, std::uint64_t seed)
    : followers_(followers), rng_(seed) {}

std::chrono::microseconds ReplicationModel::draw_round() {
  std::uniform_int_distribution<int> delay_us(1000, 5000);
  int slowest = 0;
  for (unsigned i = 0; i < followers_; ++i) slowest = std::max(slowest, delay_us(rng_));
  return std::chrono::microseconds(slowest);
}

std::chrono::microseconds ReplicationModel::broadcast() {
  auto d = draw_round();
  std::this_thread::sleep_for(d);
  return d;
}

Block cut_block_kafka(std::vector<Transaction> pending, const ChainTip& tip,
                      std::int64_t timestamp, ReplicationModel& replication) {
  Block b;
  b.height = tip.height;
  b.prev_hash = tip.prev_hash;
  b.timestamp = timestamp;
  b.txs = std::move(pending);
  b.seal();
  replication.broadcast();
  return b;
}

PowBlock cut_block_pow(std::vector<Transaction> pending, const ChainTip& tip,
                       std::int64_t timestamp, unsigned difficulty_bits) {
  if (difficulty_bits < 1 || difficulty_bits > 32) {
    throw Error(Errc::InvalidArgument, "difficulty must be in [1, 32]");
  }
  PowBlock out;
  Block& b = out.block;
  b.height = tip.height;
  b.prev_hash = tip.prev_hash;
  b.timestamp = timestamp;
  b.txs = std::move(pending);
  b.pow_bits = static_cast<std::uint8_t>(difficulty_bits);

  Writer w;
  w.raw(b.header()).u8(b.pow_bits).u64(0);
  Bytes preimage = std::move(w).data();
  const std::size_t nonce_at = preimage.size() - 8;
  crypto::Sha256 hasher;
  for (std::uint64_t nonce = 0;; ++nonce) {
    for (int i = 0; i < 8; ++i) preimage[nonce_at + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    Hash h = hasher.update(preimage).finish();
    ++out.attempts;
    if (crypto::leading_zero_bits(h) >= difficulty_bits) {
      b.nonce = nonce;
      b.block_hash = h;
      return out;
    }
  }
}

std::int64_t system_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

OrderingService::OrderingService(OrderingConfig config, ChainTip tip, Sink sink, Clock clock,
                                 CommittedCheck already_committed, std::uint64_t seed)
    : config_(config),
      tip_(tip),
      sink_(std::move(sink)),
      clock_(std::move(clock)),
      already_committed_(std::move(already_committed)),
      replication_(config.node_count, seed) {
  config_.validate();
  worker_ = std::thread([this] { run(); });
}

OrderingService::~OrderingService() { close(); }

void OrderingService::submit(Transaction tx) {
  std::string key(tx.tx_id.begin(), tx.tx_id.end());
  {
    std::lock_guard lock(mu_);
    if (closed_) throw Error(Errc::QueueClosed, "ordering service is shut down");
    if (seen_.contains(key) || (already_committed_ && already_committed_(tx.tx_id))) {
      throw Error(Errc::Duplicate, "transaction " + to_hex(tx.tx_id) + " already submitted");
    }
    seen_.insert(std::move(key));
    if (pending_.empty()) batch_started_ = std::chrono::steady_clock::now();
    pending_.push_back(std::move(tx));
  }
  cv_.notify_one();
}

void OrderingService::close() {
  {
    std::lock_guard lock(mu_);
    if (closed_ && !worker_.joinable()) return;
    closed_ = true;
  }
  cv_.notify_one();
  if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

std::vector<OrderingService::BlockStats> OrderingService::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void OrderingService::run() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto deadline = batch_started_ + config_.batch_timeout;
    bool full = pending_.size() >= config_.max_txs_per_block;
    bool timed_out = !pending_.empty() && std::chrono::steady_clock::now() >= deadline;
    if (full || timed_out || (closed_ && !pending_.empty())) {
      std::size_t n = std::min(pending_.size(), config_.max_txs_per_block);
      std::vector<Transaction> batch;
      batch.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        batch.push_back(std::move(pending_.front()));
        pending_.pop_front();
      }
      // Leftovers start a fresh batch window.
      if (!pending_.empty()) batch_started_ = std::chrono::steady_clock::now();
      lock.unlock();
      cut(std::move(batch));
      lock.lock();
      continue;
    }
    if (closed_) return;
    if (pending_.empty()) {
      cv_.wait(lock);
    } else {
      cv_.wait_until(lock, deadline);
    }
  }
}

void OrderingService::cut(std::vector<Transaction> batch) {
  const auto start = std::chrono::steady_clock::now();
  BlockStats s;
  s.tx_count = batch.size();
  Block block;
  if (config_.backend == Backend::kafka_style) {
    block = cut_block_kafka(std::move(batch), tip_, clock_(), replication_);
  } else {
    auto pow = cut_block_pow(std::move(batch), tip_, clock_(), config_.pow_difficulty_bits);
    s.pow_attempts = pow.attempts;
    block = std::move(pow.block);
    replication_.broadcast();
  }
  sink_(block);
  tip_.height = block.height + 1;
  tip_.prev_hash = block.block_hash;
  s.height = block.height;
  s.commit_millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::lock_guard lock(mu_);
  stats_.push_back(s);
}

std::vector<unsigned> default_node_counts() {
  std::vector<unsigned> out;
  for (unsigned n = 10; n <= 100; n += 10) out.push_back(n);
  return out;
}

namespace {

/// Writes one key per transaction so commits do real state work.
class ScratchExecutor : public TxExecutor {
 public:
  TxOutcome execute(const Transaction& tx, const WorldState&, std::int64_t) override {
    TxOutcome out;
    out.result = ContractResult::success();
    out.writes["bench/" + to_hex(tx.tx_id)] = tx.args.empty() ? Bytes{} : tx.args.front();
    return out;
  }
};

}  // namespace

std::vector<ConsensusSample> measure_consensus_samples(const OrderingConfig& config,
                                                       unsigned rounds,
                                                       const std::vector<unsigned>& node_counts,
                                                       std::uint64_t seed) {
  config.validate();
  if (rounds < 1) throw Error(Errc::InvalidArgument, "rounds must be >= 1");
  auto keys = crypto::generate_keypair();
  Identity client{"consensus-client", Role::admin, "bench", keys.public_key, 0, keys.seed};

  std::vector<ConsensusSample> samples;
  std::uint64_t nonce = 0;
  for (unsigned nodes : node_counts) {
    ScratchExecutor executor;
    Ledger ledger({}, executor);
    ReplicationModel replication(nodes, seed + nodes);
    for (unsigned round = 0; round < rounds; ++round) {
      std::vector<Transaction> batch;
      for (std::size_t i = 0; i < config.max_txs_per_block; ++i) {
        batch.push_back(make_transaction(client, TxKind::invoke, ContractId::PSC, "Bench",
                                         {to_bytes("payload")}, system_seconds(), ++nonce));
      }
      ChainTip tip{ledger.block_count(), ledger.tip_hash()};
      ConsensusSample s{config.backend, nodes, round, 0, 0};
      const auto start = std::chrono::steady_clock::now();
      Block block;
      if (config.backend == Backend::kafka_style) {
        block = cut_block_kafka(std::move(batch), tip, system_seconds(), replication);
      } else {
        auto pow = cut_block_pow(std::move(batch), tip, system_seconds(), config.pow_difficulty_bits);
        s.pow_attempts = pow.attempts;
        block = std::move(pow.block);
        replication.broadcast();
      }
      ledger.append_block(block);
      s.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      samples.push_back(s);
    }
  }
  return samples;
}

std::vector<ConsensusSummary> summarize(const std::vector<ConsensusSample>& samples) {
  std::map<unsigned, std::pair<double, unsigned>> acc;
  for (const auto& s : samples) {
    auto& [sum, n] = acc[s.node_count];
    sum += s.millis;
    ++n;
  }
  std::vector<ConsensusSummary> out;
  for (const auto& [nodes, sn] : acc) out.push_back({nodes, sn.first / sn.second});
  return out;
}

std::vector<ConsensusSummary> measure_consensus(const OrderingConfig& config, unsigned rounds) {
  return summarize(measure_consensus_samples(config, rounds));
}

void write_consensus_csv(std::ostream& out, const std::vector<ConsensusSample>& samples) {
  out << "backend,node_count,round,millis\n";
  for (const auto& s : samples) {
    out << backend_name(s.backend) << ',' << s.node_count << ',' << s.round << ',' << s.millis << '\n';
  }
}

}  // namespace medledger
