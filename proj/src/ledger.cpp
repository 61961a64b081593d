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

#include "medledger/ledger.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <mutex>

#include "medledger/codec.hpp"
#include "medledger/crypto.hpp"
#include "medledger/error.hpp"

namespace medledger {
namespace {

constexpr std::uint32_t kMaxRecord = 256u << 20;

std::string hash_key(const Hash& h) { return std::string(h.begin(), h.end()); }

const std::vector<HistoryEntry> kNoHistory;

}  // namespace

std::string_view contract_name(ContractId id) {
  switch (id) {
    case ContractId::PSC: return "PSC";
    case ContractId::ASC: return "ASC";
    case ContractId::RSC: return "RSC";
  }
  return "?";
}

std::optional<ContractId> parse_contract(std::string_view name) {
  if (name == "PSC") return ContractId::PSC;
  if (name == "ASC") return ContractId::ASC;
  if (name == "RSC") return ContractId::RSC;
  return std::nullopt;
}

Bytes Transaction::canonical_payload() const {
  Writer w;
  w.u8(static_cast<std::uint8_t>(kind)).u8(static_cast<std::uint8_t>(contract)).str(method);
  w.u32(static_cast<std::uint32_t>(args.size()));
  for (const auto& a : args) w.bytes(a);
  w.str(submitter).i64(timestamp).u64(nonce);
  return std::move(w).data();
}

Transaction Transaction::from_envelope(SignedEnvelope envelope) {
  Transaction tx;
  Reader r(envelope.payload);
  std::uint8_t kind = r.u8();
  std::uint8_t contract = r.u8();
  if (kind > 1) throw Error(Errc::ParseError, "unknown transaction kind");
  if (contract > 2) throw Error(Errc::ParseError, "unknown contract");
  tx.kind = static_cast<TxKind>(kind);
  tx.contract = static_cast<ContractId>(contract);
  tx.method = r.str();
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 4) throw Error(Errc::ParseError, "argument count exceeds payload");
  tx.args.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) tx.args.push_back(r.bytes());
  tx.submitter = r.str();
  tx.timestamp = r.i64();
  tx.nonce = r.u64();
  r.expect_done();
  tx.tx_id = crypto::sha256(envelope.payload);
  tx.envelope = std::move(envelope);
  return tx;
}

bool Transaction::well_formed() const {
  return envelope.signer == submitter && envelope.payload == canonical_payload() &&
         tx_id == crypto::sha256(envelope.payload);
}

Transaction make_transaction(const Identity& submitter, TxKind kind, ContractId contract,
                             std::string method, std::vector<Bytes> args, std::int64_t timestamp,
                             std::uint64_t nonce) {
  Transaction tx;
  tx.kind = kind;
  tx.contract = contract;
  tx.method = std::move(method);
  tx.args = std::move(args);
  tx.submitter = submitter.user_id;
  tx.timestamp = timestamp;
  tx.nonce = nonce;
  tx.envelope = sign(submitter, tx.canonical_payload());
  tx.tx_id = crypto::sha256(tx.envelope.payload);
  return tx;
}

Bytes Block::header() const {
  Writer w;
  w.u64(height).raw(prev_hash).i64(timestamp);
  for (const auto& tx : txs) w.raw(tx.tx_id);
  return std::move(w).data();
}

Hash Block::compute_hash() const {
  if (pow_bits == 0) return crypto::sha256(header());
  Writer w;
  w.raw(header()).u8(pow_bits).u64(nonce);
  return crypto::sha256(w.data());
}

bool Block::meets_difficulty() const {
  return crypto::leading_zero_bits(compute_hash()) >= pow_bits;
}

Bytes Block::serialize() const {
  Writer w;
  w.u64(height).raw(prev_hash).i64(timestamp).u8(pow_bits).u64(nonce);
  w.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& tx : txs) {
    w.raw(tx.tx_id).bytes(tx.envelope.payload).str(tx.envelope.signer).bytes(tx.envelope.signature);
  }
  w.raw(block_hash);
  return std::move(w).data();
}

Block Block::deserialize(ByteView bytes) {
  Reader r(bytes);
  Block b;
  b.height = r.u64();
  b.prev_hash = r.hash();
  b.timestamp = r.i64();
  b.pow_bits = r.u8();
  b.nonce = r.u64();
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 44) throw Error(Errc::ParseError, "transaction count exceeds block size");
  b.txs.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    Hash stored_id = r.hash();
    SignedEnvelope env;
    env.payload = r.bytes();
    env.signer = r.str();
    env.signature = r.bytes();
    Transaction tx = Transaction::from_envelope(std::move(env));
    if (tx.tx_id != stored_id) throw Error(Errc::ParseError, "stored tx_id does not match payload");
    b.txs.push_back(std::move(tx));
  }
  b.block_hash = r.hash();
  r.expect_done();
  return b;
}

// --- world state -------------------------------------------------------------

const StateEntry* WorldState::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Bytes> WorldState::get(const std::string& key) const {
  const StateEntry* e = find(key);
  if (e == nullptr || e->deleted) return std::nullopt;
  return e->value;
}

const std::vector<HistoryEntry>& WorldState::history(const std::string& key) const {
  auto it = history_.find(key);
  return it == history_.end() ? kNoHistory : it->second;
}

void WorldState::apply(const WriteSet& writes, Version version, const Hash& tx_id) {
  for (const auto& [key, value] : writes) {
    auto& entry = entries_[key];
    entry.key = key;
    entry.version = version;
    entry.deleted = !value.has_value();
    entry.value = value.value_or(Bytes{});
    history_[key].push_back({version, entry.value, entry.deleted, tx_id});
  }
}

Bytes WorldState::serialize() const {
  Writer w;
  w.u64(entries_.size());
  for (const auto& [key, e] : entries_) {
    w.str(key).u8(e.deleted ? 1 : 0).bytes(e.value).u64(e.version.height).u32(e.version.tx_index);
  }
  return std::move(w).data();
}

std::size_t WorldState::live_keys() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += e.deleted ? 0 : 1;
  return n;
}

Bytes TxContext::get_state(const std::string& key) const {
  auto v = find_state(key);
  if (!v) throw Error(Errc::KeyNotFound, "no state for key " + key);
  return *v;
}

std::optional<Bytes> TxContext::find_state(const std::string& key) const {
  if (auto it = writes_.find(key); it != writes_.end()) return it->second;
  return committed_.get(key);
}

void TxContext::put_state(const std::string& key, Bytes value) { writes_[key] = std::move(value); }

void TxContext::delete_state(const std::string& key) { writes_[key] = std::nullopt; }

// --- block log ---------------------------------------------------------------

namespace {

/// Splits a log image into record payloads; throws on torn framing.
std::vector<ByteView> split_records(ByteView image) {
  std::vector<ByteView> out;
  std::size_t pos = 0;
  while (pos < image.size()) {
    if (image.size() - pos < 4) throw Error(Errc::InvalidBlock, "torn record header at end of log");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = len << 8 | image[pos + i];
    pos += 4;
    if (len > kMaxRecord || len > image.size() - pos) {
      throw Error(Errc::InvalidBlock, "record length exceeds log size");
    }
    out.push_back(image.subspan(pos, len));
    pos += len;
  }
  return out;
}

Bytes read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + p.string());
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Structural and cryptographic checks that do not need world state.
bool check_chain(const std::vector<Block>& blocks, const SignatureCheck& check) {
  Hash prev{};
  std::unordered_set<std::string> seen;
  for (std::size_t h = 0; h < blocks.size(); ++h) {
    const Block& b = blocks[h];
    if (b.height != h || b.prev_hash != prev) return false;
    if (b.compute_hash() != b.block_hash) return false;
    if (b.pow_bits > 0 && !b.meets_difficulty()) return false;
    if (b.pow_bits == 0 && b.nonce != 0) return false;
    for (const auto& tx : b.txs) {
      if (!tx.well_formed()) return false;
      if (!seen.insert(hash_key(tx.tx_id)).second) return false;
      if (check) {
        try {
          if (!check(tx.envelope)) return false;
        } catch (const Error&) {
          return false;
        }
      }
    }
    prev = b.block_hash;
  }
  return true;
}

}  // namespace

std::vector<Block> read_block_log(const std::filesystem::path& log_path) {
  Bytes image = read_file(log_path);
  std::vector<Block> blocks;
  for (ByteView rec : split_records(image)) {
    try {
      blocks.push_back(Block::deserialize(rec));
    } catch (const Error& e) {
      throw Error(Errc::InvalidBlock, "malformed block record: " + std::string(e.what()));
    }
  }
  return blocks;
}

Ledger::Ledger(std::filesystem::path log_path, TxExecutor& executor, bool durable)
    : path_(std::move(log_path)), executor_(executor), durable_(durable) {
  if (path_.empty()) return;
  if (std::filesystem::exists(path_)) {
    for (const Block& b : read_block_log(path_)) {
      validate_locked(b);
      apply_locked(b);
    }
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(Errc::Io, "open " + path_.string() + ": " + std::strerror(errno));
}

Ledger::~Ledger() {
  if (fd_ >= 0) ::close(fd_);
}

void Ledger::validate_locked(const Block& block) const {
  if (block.height != blocks_.size()) {
    throw Error(Errc::ChainMismatch, "expected height " + std::to_string(blocks_.size()) +
                                         ", got " + std::to_string(block.height));
  }
  Hash expected_prev = blocks_.empty() ? Hash{} : blocks_.back().block_hash;
  if (block.prev_hash != expected_prev) {
    throw Error(Errc::ChainMismatch, "prev_hash does not link to tip at height " +
                                         std::to_string(block.height));
  }
  if (block.compute_hash() != block.block_hash) {
    throw Error(Errc::InvalidBlock, "block hash mismatch at height " + std::to_string(block.height));
  }
  if (block.pow_bits > 0 ? !block.meets_difficulty() : block.nonce != 0) {
    throw Error(Errc::InvalidBlock, "proof of work invalid at height " + std::to_string(block.height));
  }
  std::unordered_set<std::string> in_block;
  for (const auto& tx : block.txs) {
    if (!tx.well_formed()) {
      throw Error(Errc::InvalidBlock, "malformed transaction " + to_hex(tx.tx_id));
    }
    auto key = hash_key(tx.tx_id);
    if (tx_ids_.contains(key) || !in_block.insert(key).second) {
      throw Error(Errc::InvalidBlock, "duplicate transaction " + to_hex(tx.tx_id));
    }
  }
}

std::vector<TxOutcome> Ledger::apply_locked(const Block& block) {
  std::vector<TxOutcome> outcomes;
  outcomes.reserve(block.txs.size());
  for (std::uint32_t i = 0; i < block.txs.size(); ++i) {
    const Transaction& tx = block.txs[i];
    TxOutcome out = executor_.execute(tx, state_, block.timestamp);
    out.tx_id = tx.tx_id;
    state_.apply(out.writes, Version{block.height, i}, tx.tx_id);
    tx_ids_.insert(hash_key(tx.tx_id));
    outcomes.push_back(std::move(out));
  }
  blocks_.push_back(block);
  return outcomes;
}

std::vector<TxOutcome> Ledger::append_block(const Block& block) {
  std::unique_lock lock(mu_);
  validate_locked(block);
  if (fd_ >= 0) {
    Bytes body = block.serialize();
    Writer frame;
    frame.u32(static_cast<std::uint32_t>(body.size())).raw(body);
    const Bytes& rec = frame.data();
    std::size_t off = 0;
    while (off < rec.size()) {
      ssize_t n = ::write(fd_, rec.data() + off, rec.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::Io, "append " + path_.string() + ": " + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
    if (durable_ && ::fdatasync(fd_) != 0) {
      throw Error(Errc::Io, "fdatasync " + path_.string() + ": " + std::strerror(errno));
    }
  }
  return apply_locked(block);
}

std::size_t Ledger::block_count() const {
  std::shared_lock lock(mu_);
  return blocks_.size();
}

Hash Ledger::tip_hash() const {
  std::shared_lock lock(mu_);
  return blocks_.empty() ? Hash{} : blocks_.back().block_hash;
}

std::optional<Block> Ledger::block(std::uint64_t height) const {
  std::shared_lock lock(mu_);
  if (height >= blocks_.size()) return std::nullopt;
  return blocks_[height];
}

bool Ledger::contains_tx(const Hash& tx_id) const {
  std::shared_lock lock(mu_);
  return tx_ids_.contains(hash_key(tx_id));
}

std::optional<Bytes> Ledger::get_state(const std::string& key) const {
  std::shared_lock lock(mu_);
  return state_.get(key);
}

std::optional<StateEntry> Ledger::get_entry(const std::string& key) const {
  std::shared_lock lock(mu_);
  const StateEntry* e = state_.find(key);
  if (e == nullptr) return std::nullopt;
  return *e;
}

std::vector<HistoryEntry> Ledger::get_history(const std::string& key) const {
  std::shared_lock lock(mu_);
  return state_.history(key);
}

Bytes Ledger::state_snapshot() const {
  std::shared_lock lock(mu_);
  return state_.serialize();
}

bool Ledger::verify_chain(const SignatureCheck& check) const {
  if (path_.empty()) {
    std::shared_lock lock(mu_);
    return check_chain(blocks_, check);
  }
  return verify_log(path_, check);
}

bool Ledger::verify_log(const std::filesystem::path& log_path, const SignatureCheck& check) {
  try {
    return check_chain(read_block_log(log_path), check);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace medledger
