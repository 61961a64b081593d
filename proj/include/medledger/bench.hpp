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
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medledger/node.hpp"
#include "medledger/ordering.hpp"

namespace medledger::bench {

enum class Op {
  PscAdd,
  PscUpdate,
  PscQuery,
  PscDelete,
  RscAdd,
  RscUpdate,
  RscQuery,
  RscDelete,
  AscCheck,
};

/// "PSC.Add", "RSC.Query", "ASC.Check", ...
std::string_view op_name(Op op);
std::optional<Op> parse_op(std::string_view name);
std::vector<Op> all_ops();

struct LoadProfile {
  std::vector<unsigned> client_counts{200, 400, 600, 800, 1000};
  std::vector<Op> ops = all_ops();
  unsigned ops_per_client = 10;
  std::size_t payload_bytes = 1024;

  /// Throws Error(ConfigError): counts must be non-empty and ascending.
  void validate() const;

  /// `key = value` lines: client_counts and ops (comma lists),
  /// ops_per_client, payload_bytes. Missing keys keep their defaults.
  static LoadProfile parse(std::string_view text);
};

struct LoadRow {
  Op op = Op::PscAdd;
  unsigned clients = 0;
  double total_ms = 0;
  std::uint64_t ok_count = 0;
  std::uint64_t err_count = 0;
  /// Completed operations per second of wall time.
  double tps = 0;
  /// Mean submit-to-result latency over all requests in the cell.
  double mean_latency_ms = 0;
};

/// Creates a node in `dir` marked as disposable.
std::unique_ptr<Node> make_scratch_node(const std::filesystem::path& dir,
                                        const NetworkConfig& config = {});

/// For every client count and op, starts that many concurrent virtual
/// clients, each issuing `ops_per_client` synchronous requests, and records
/// wall time, completions and throughput. Targets for query, update, delete
/// and access cells are created beforehand (reusing the add cell's output
/// when it ran). Throws Error(ConfigError) unless `node` is a scratch node.
std::vector<LoadRow> run_load(const LoadProfile& profile, Node& node);

/// `op,clients,total_ms,ok_count,err_count,tps` with a header row.
void write_load_csv(std::ostream& out, const std::vector<LoadRow>& rows);

struct ConsensusComparison {
  std::vector<ConsensusSample> samples;
  std::vector<ConsensusSummary> kafka;
  std::vector<ConsensusSummary> pow;
};

/// Runs both ordering backends over node counts 10..100 (step 10).
/// `base` supplies block size and difficulty; its backend is ignored.
ConsensusComparison run_consensus_compare(unsigned rounds, const OrderingConfig& base = {});

/// Combined samples for both backends in the consensus CSV schema.
void write_consensus_compare_csv(std::ostream& out, const ConsensusComparison& cmp);

/// Whitespace-separated `node_count kafka_mean_ms pow_mean_ms` rows for
/// gnuplot, preceded by a `#` header line.
void write_gnuplot_data(std::ostream& out, const ConsensusComparison& cmp);

}  // namespace medledger::bench
