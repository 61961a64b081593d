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

#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "medledger/error.hpp"
#include "medledger/ordering.hpp"
#include "test_support.hpp"

using namespace medledger;
using namespace std::chrono_literals;

namespace {

struct Source {
  CertificateAuthority ca;
  Identity who = ca.register_identity("orderer-test", Role::admin, "it");
  std::uint64_t nonce = 0;
  Transaction tx() {
    return make_transaction(who, TxKind::invoke, ContractId::PSC, "Ping", {}, 1, nonce++);
  }
};

struct Collector {
  std::mutex mu;
  std::vector<Block> blocks;
  OrderingService::Sink sink() {
    return [this](const Block& b) {
      std::lock_guard lock(mu);
      blocks.push_back(b);
    };
  }
  std::size_t count() {
    std::lock_guard lock(mu);
    return blocks.size();
  }
};

}  // namespace

TEST_CASE("config parse, validate and print") {
  auto cfg = OrderingConfig::parse(
      "# comment\nbackend = pow\nmax_txs_per_block = 5\nbatch_timeout_ms = 40\n"
      "pow_difficulty_bits = 12\nnode_count = 30\nunrelated = 1\n");
  CHECK(cfg.backend == Backend::pow);
  CHECK(cfg.max_txs_per_block == 5);
  CHECK(cfg.batch_timeout == 40ms);
  CHECK(cfg.pow_difficulty_bits == 12);
  CHECK(cfg.node_count == 30);
  auto again = OrderingConfig::parse(cfg.to_text());
  CHECK(again.to_text() == cfg.to_text());

  for (const char* bad : {"max_txs_per_block = 0", "pow_difficulty_bits = 0", "pow_difficulty_bits = 33",
                          "node_count = 0", "backend = raft", "max_txs_per_block = ten"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(OrderingConfig::parse(bad).validate(), Error);
  }
}

TEST_CASE("25 transactions cut into 10, 10, 5 in arrival order") {
  Source src;
  Collector out;
  std::vector<Transaction> txs;
  for (int i = 0; i < 25; ++i) txs.push_back(src.tx());
  {
    OrderingConfig cfg;
    cfg.node_count = 1;
    OrderingService svc(cfg, {}, out.sink());
    for (const auto& t : txs) svc.submit(t);
    svc.close();
  }
  REQUIRE(out.blocks.size() == 3);
  CHECK(out.blocks[0].txs.size() == 10);
  CHECK(out.blocks[1].txs.size() == 10);
  CHECK(out.blocks[2].txs.size() == 5);
  std::size_t i = 0;
  Hash prev{};
  for (const auto& b : out.blocks) {
    CHECK(b.height == static_cast<std::uint64_t>(&b - out.blocks.data()));
    CHECK(b.prev_hash == prev);
    CHECK(b.compute_hash() == b.block_hash);
    prev = b.block_hash;
    for (const auto& t : b.txs) CHECK(t.tx_id == txs[i++].tx_id);
  }
}

TEST_CASE("partial batch is cut after the timeout") {
  Source src;
  Collector out;
  OrderingConfig cfg;
  cfg.batch_timeout = 50ms;
  cfg.node_count = 1;
  OrderingService svc(cfg, {}, out.sink());
  for (int i = 0; i < 3; ++i) svc.submit(src.tx());
  for (int waited = 0; out.count() == 0 && waited < 200; ++waited) std::this_thread::sleep_for(10ms);
  REQUIRE(out.count() == 1);
  CHECK(out.blocks[0].txs.size() == 3);
  auto stats = svc.stats();
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].tx_count == 3);
  svc.close();
}

TEST_CASE("duplicates and closed queue") {
  Source src;
  Collector out;
  auto committed = src.tx();
  OrderingService svc(OrderingConfig{}, {}, out.sink(), system_seconds,
                      [&](const Hash& id) { return id == committed.tx_id; });
  auto t = src.tx();
  svc.submit(t);
  auto code = [&](const Transaction& x) {
    try {
      svc.submit(x);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Internal;
  };
  CHECK(code(t) == Errc::Duplicate);
  CHECK(code(committed) == Errc::Duplicate);
  svc.close();
  CHECK(code(src.tx()) == Errc::QueueClosed);
  CHECK(out.count() == 1);
}

TEST_CASE("concurrent submitters lose nothing") {
  Source src;
  Collector out;
  std::vector<Transaction> txs;
  for (int i = 0; i < 400; ++i) txs.push_back(src.tx());
  {
    OrderingConfig cfg;
    cfg.batch_timeout = 20ms;
    cfg.node_count = 1;
    OrderingService svc(cfg, {}, out.sink());
    std::vector<std::thread> ts;
    for (int w = 0; w < 8; ++w) {
      ts.emplace_back([&, w] {
        for (std::size_t i = w; i < txs.size(); i += 8) svc.submit(txs[i]);
      });
    }
    for (auto& th : ts) th.join();
    svc.close();
  }
  std::set<std::string> seen;
  for (const auto& b : out.blocks) {
    CHECK(b.txs.size() <= 10);
    for (const auto& t : b.txs) CHECK(seen.insert(to_hex(t.tx_id)).second);
  }
  CHECK(seen.size() == txs.size());
}

TEST_CASE("replication round stays in range and grows with followers") {
  ReplicationModel one(1, 9);
  for (int i = 0; i < 1000; ++i) {
    auto d = one.draw_round();
    CHECK(d >= 1000us);
    CHECK(d <= 5000us);
  }
  // Same seed: the wider round draws a superset of delays.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::chrono::microseconds prev{0};
    for (unsigned n = 10; n <= 100; n += 10) {
      ReplicationModel m(n, seed);
      auto d = m.draw_round();
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("pow blocks meet their difficulty") {
  Source src;
  for (unsigned bits : {1u, 4u, 8u, 12u}) {
    auto pb = cut_block_pow({src.tx(), src.tx()}, {}, 5, bits);
    CHECK(pb.block.pow_bits == bits);
    CHECK(pb.block.meets_difficulty());
    CHECK(crypto::leading_zero_bits(pb.block.compute_hash()) >= bits);
    CHECK(pb.block.block_hash == pb.block.compute_hash());
    CHECK(pb.attempts == pb.block.nonce + 1);
  }
}

TEST_CASE("mean pow attempts track 2^d") {
  Source src;
  auto mean_attempts = [&](unsigned bits, int runs) {
    double total = 0;
    for (int r = 0; r < runs; ++r) {
      std::vector<Transaction> txs;
      for (int i = 0; i < 10; ++i) txs.push_back(src.tx());
      total += static_cast<double>(cut_block_pow(std::move(txs), {}, r, bits).attempts);
    }
    return total / runs;
  };
  auto d1 = mean_attempts(1, 400);
  CHECK(d1 > 1.5);
  CHECK(d1 < 2.5);
  for (unsigned bits : {8u, 16u}) {
    auto m = mean_attempts(bits, bits == 16 ? 30 : 200);
    double expected = static_cast<double>(1u << bits);
    CAPTURE(bits);
    CAPTURE(m);
    CHECK(m > expected / 3);
    CHECK(m < expected * 3);
  }
}

TEST_CASE("consensus measurement shape and CSV") {
  OrderingConfig cfg;
  cfg.pow_difficulty_bits = 8;
  for (Backend b : {Backend::kafka_style, Backend::pow}) {
    cfg.backend = b;
    auto samples = measure_consensus_samples(cfg, 2, {10, 20});
    REQUIRE(samples.size() == 4);
    for (const auto& s : samples) {
      CHECK(s.backend == b);
      CHECK(s.millis > 0);
      if (b == Backend::pow) CHECK(s.pow_attempts > 0);
    }
    auto summary = summarize(samples);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].node_count == 10);
    CHECK(summary[1].node_count == 20);
    std::ostringstream csv;
    write_consensus_csv(csv, samples);
    CHECK(csv.str().rfind("backend,node_count,round,millis\n", 0) == 0);
  }
  auto single = measure_consensus_samples(OrderingConfig{}, 1, {10});
  CHECK(single.size() == 1);
  CHECK(default_node_counts() == std::vector<unsigned>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
}
