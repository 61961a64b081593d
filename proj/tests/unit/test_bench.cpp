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

#include <sstream>

#include "doctest.h"
#include "medledger/bench.hpp"
#include "medledger/error.hpp"
#include "test_support.hpp"

using namespace medledger;
using namespace medledger::bench;
using namespace std::chrono_literals;

TEST_CASE("op names") {
  CHECK(all_ops().size() == 9);
  for (Op op : all_ops()) CHECK(parse_op(op_name(op)) == op);
  CHECK(op_name(Op::AscCheck) == "ASC.Check");
  CHECK_FALSE(parse_op("PSC.Frob").has_value());
}

TEST_CASE("load profile parsing and validation") {
  auto p = LoadProfile::parse("client_counts = 1, 5\nops = PSC.Add,RSC.Query\nops_per_client = 2\npayload_bytes = 64\n");
  CHECK(p.client_counts == std::vector<unsigned>{1, 5});
  CHECK(p.ops == std::vector<Op>{Op::PscAdd, Op::RscQuery});
  CHECK(p.ops_per_client == 2);
  CHECK(p.payload_bytes == 64);
  CHECK(LoadProfile{}.client_counts == std::vector<unsigned>{200, 400, 600, 800, 1000});
  for (const char* bad : {"client_counts = 5,1", "client_counts = ", "ops = Nope", "ops_per_client = 0",
                          "speed = 3", "client_counts = 0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(LoadProfile::parse(bad), Error);
  }
}

TEST_CASE("load run accounts for every request") {
  testing::TempDir dir("bench");
  NetworkConfig cfg;
  cfg.ordering.batch_timeout = 10ms;
  auto node = make_scratch_node(dir / "scratch", cfg);
  LoadProfile p;
  p.client_counts = {2, 5};
  p.ops_per_client = 3;
  p.payload_bytes = 128;
  auto rows = run_load(p, *node);
  REQUIRE(rows.size() == 18);
  for (const auto& r : rows) {
    CAPTURE(op_name(r.op));
    CHECK(r.ok_count + r.err_count == std::uint64_t{r.clients} * 3);
    CHECK(r.err_count == 0);
    CHECK(r.tps > 0);
    CHECK(r.mean_latency_ms > 0);
  }
  std::ostringstream csv;
  write_load_csv(csv, rows);
  CHECK(csv.str().rfind("op,clients,total_ms,ok_count,err_count,tps\n", 0) == 0);
  CHECK(node->verify_chain());
}

TEST_CASE("queries without a preceding add still find targets") {
  testing::TempDir dir("bench-prep");
  NetworkConfig cfg;
  cfg.ordering.batch_timeout = 10ms;
  auto node = make_scratch_node(dir / "scratch", cfg);
  LoadProfile p;
  p.client_counts = {3};
  p.ops = {Op::RscDelete, Op::PscQuery, Op::AscCheck};
  p.ops_per_client = 2;
  auto rows = run_load(p, *node);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(r.err_count == 0);
}

TEST_CASE("load refuses a non-scratch directory") {
  testing::TempDir dir("bench-prod");
  auto node = Node::bootstrap(dir.path(), NetworkConfig{});
  try {
    run_load(LoadProfile{}, *node);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
  }
  CHECK(node->ledger().block_count() == 1);
}

TEST_CASE("consensus comparison outputs") {
  OrderingConfig base;
  base.pow_difficulty_bits = 4;
  auto cmp = run_consensus_compare(1, base);
  CHECK(cmp.samples.size() == 20);
  CHECK(cmp.kafka.size() == 10);
  CHECK(cmp.pow.size() == 10);
  std::ostringstream dat;
  write_gnuplot_data(dat, cmp);
  std::istringstream lines(dat.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("#", 0) == 0);
  int rows = 0;
  while (std::getline(lines, line)) {
    unsigned n = 0;
    double k = 0, p = 0;
    std::istringstream(line) >> n >> k >> p;
    CHECK(n == 10u * static_cast<unsigned>(++rows));
    CHECK(k > 0);
    CHECK(p > 0);
  }
  CHECK(rows == 10);
}
