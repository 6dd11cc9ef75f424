// Copyright 2026 The Thinkey Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef THINKEY_SCENARIO_SCENARIO_H_
#define THINKEY_SCENARIO_SCENARIO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "thinkey/analysis/analysis.h"
#include "thinkey/common/types.h"
#include "thinkey/consensus/consensus.h"

namespace thinkey::scenario {

struct ByzantineNode {
  NodeId node = 0;
  consensus::Strategy strategy = consensus::Strategy::kSilent;
};

// Full description of one simulated deployment. Every field has a JSON key
// of the same name.
struct Scenario {
  std::uint64_t seed = 1;
  std::uint32_t shard_count = 4;
  std::uint32_t nodes_total = 120;
  std::uint32_t committee_size = 13;
  std::uint32_t epoch_rounds = 20;
  std::uint64_t tx_count = 10000;
  double cross_chain_ratio = 0.2;
  std::vector<ByzantineNode> byzantine;
  // Messages per block: inputs plus the relays the block emits.
  std::uint32_t block_size_limit = 500;

  // Peer network. The gossip parameters drive the dissemination measurement
  // reported in the manifest; committee traffic uses direct links.
  std::uint32_t degree = 10;
  std::uint32_t full_fanout = 1;
  double latency_min_ms = 10;
  double latency_max_ms = 100;
  double bandwidth_bytes_per_ms = 1250;

  // Workload.
  std::uint64_t accounts = 1000;
  std::uint64_t initial_balance = 1000000;
  std::uint64_t stake_per_node = 1000;
  // Transactions per simulated second; 0 submits everything at t = 0.
  double arrival_rate_tps = 0;

  // Cost model.
  std::uint32_t message_bytes = 250;
  std::uint32_t header_bytes = 200;
  double exec_ms_per_message = 0.5;
  double validate_ms_per_message = 0.25;
  // Merkle-proof check of a relay input, per sibling hash.
  double proof_ms_per_step = 0.1;
  // Lookup and attestation check of one origin block's digest, once per
  // distinct origin block among a block's relay inputs.
  double origin_check_ms = 2;
  double root_block_interval_ms = 200;
  // Attestation check and recording of one digest on the root chain.
  double root_ms_per_digest = 5;

  // Probability that each executed relay is delivered again to its
  // recipient chain.
  double redelivery_prob = 0;
  bool merge_outer_relays = false;
  // Root blocks allowed between a relay's root confirmation and its
  // execution before the run reports a delivery violation.
  std::uint32_t delivery_bound_root_blocks = 100;
  double max_sim_ms = 3.6e6;
};

// Field-level validation; the message names the offending key.
absl::Status Validate(const Scenario& s);

// Applies normalizations (cross_chain_ratio is 0 on a single chain).
Scenario Normalize(Scenario s);

// Unknown keys and type mismatches are errors naming the key. Missing keys
// keep their defaults.
absl::StatusOr<Scenario> ScenarioFromJson(const nlohmann::json& j);
nlohmann::ordered_json ScenarioToJson(const Scenario& s);

// Reads a scenario file, or the "scenario" member of a run manifest.
absl::StatusOr<Scenario> LoadScenario(std::istream& in);

struct Payment {
  Address from;
  Address to;
  std::uint64_t nonce = 0;
  std::uint64_t bill = 0;
};

struct Workload {
  std::uint64_t accounts = 0;
  std::uint32_t shard_count = 1;
  double cross_chain_ratio = 0;
  std::uint64_t seed = 0;
  std::vector<Payment> payments;
};

// Random payments among addresses 1..accounts. Exactly
// round(ratio * tx_count) payments go to an account on another chain;
// nonces count up per payer from 0.
absl::StatusOr<Workload> GenerateWorkload(std::uint64_t accounts,
                                          std::uint64_t tx_count,
                                          std::uint32_t shard_count,
                                          double cross_chain_ratio,
                                          std::uint64_t seed);

// Fraction of payments whose payee lives on another chain.
double CrossFraction(const Workload& w);

// One header line with the workload parameters, then one payment per line.
void WriteWorkloadJsonl(std::ostream& out, const Workload& w);
absl::StatusOr<Workload> ReadWorkloadJsonl(std::istream& in);

enum class ViolationKind {
  kSafety,
  kConservation,
  kDoubleExecution,
  kIncomplete,
};

const char* ViolationKindName(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Process exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitSafety = 3;
inline constexpr int kExitConservation = 4;
inline constexpr int kExitDoubleExecution = 5;
inline constexpr int kExitIo = 6;
inline constexpr int kExitIncomplete = 7;

struct RunMetrics {
  std::uint64_t rounds = 0;
  std::uint64_t empty_rounds = 0;
  std::uint64_t blocks = 0;
  std::uint64_t root_blocks = 0;
  std::uint64_t tx_completed = 0;
  std::uint64_t relays = 0;
  std::uint64_t duplicates_suppressed = 0;
  std::uint64_t digest_rejections = 0;
  std::size_t held_high_watermark = 0;
  std::uint64_t punished_nodes = 0;
  std::uint64_t burned = 0;
  // Committee handovers across all chains.
  std::uint64_t handovers = 0;
  // Round start to decision, agreed rounds only.
  std::vector<double> block_times_ms;
  // Messages per agreed block, inputs and emitted relays.
  std::vector<double> block_sizes;
  // Durations of epochs every chain served in full.
  std::vector<double> epoch_ms;
  std::uint64_t genesis_value = 0;
  std::uint64_t final_value = 0;
  double gossip_mean_full_copies = 0;
  SimTime end_t = 0;
};

struct RunResult {
  analysis::ReportRow report;
  RunMetrics metrics;
  std::vector<Violation> violations;
  // Typed JSON lines: run, round, block, tx, relay and epoch records.
  std::string trace_jsonl;
  std::string report_csv;

  // First violation's code in the order safety, conservation, double
  // execution, incomplete; kExitOk when clean.
  int exit_code() const;
};

// Deterministic: the same scenario and workload give a byte-identical trace.
// A null workload is generated from the scenario.
absl::StatusOr<RunResult> Run(const Scenario& scenario,
                              const Workload* workload = nullptr);

// Manifest of a finished run: the scenario, code version, output hashes and
// headline metrics.
nlohmann::ordered_json MakeManifest(const Scenario& s, const RunResult& r);

}  // namespace thinkey::scenario

#endif  // THINKEY_SCENARIO_SCENARIO_H_
