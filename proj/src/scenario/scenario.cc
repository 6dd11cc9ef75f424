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

#include "thinkey/scenario/scenario.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "thinkey/accounts/executor.h"
#include "thinkey/accounts/message.h"
#include "thinkey/chain/block.h"
#include "thinkey/committee/committee.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/random.h"
#include "thinkey/crosschain/crosschain.h"
#include "thinkey/sim/network.h"
#include "thinkey/sim/simulator.h"

#ifndef THINKEY_VERSION
#define THINKEY_VERSION "unknown"
#endif

namespace thinkey::scenario {

using accounts::Message;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

absl::Status FieldError(const std::string& field, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat(field, ": ", what));
}

}  // namespace

absl::Status Validate(const Scenario& s) {
  if (s.shard_count < 1 || s.shard_count > 4096) {
    return FieldError("shard_count", "must be in [1, 4096]");
  }
  if (s.committee_size < 1) return FieldError("committee_size", "must be >= 1");
  if (s.nodes_total < s.committee_size) {
    return FieldError("nodes_total", "must be >= committee_size");
  }
  if (s.epoch_rounds < 1) return FieldError("epoch_rounds", "must be >= 1");
  if (!(s.cross_chain_ratio >= 0 && s.cross_chain_ratio <= 1)) {
    return FieldError("cross_chain_ratio", "must be in [0, 1]");
  }
  std::set<NodeId> seen;
  for (const ByzantineNode& b : s.byzantine) {
    if (b.node >= s.nodes_total) {
      return FieldError("byzantine",
                        absl::StrCat("node ", b.node, " is not below nodes_total"));
    }
    if (!seen.insert(b.node).second) {
      return FieldError("byzantine", absl::StrCat("node ", b.node, " repeated"));
    }
    if (b.strategy == consensus::Strategy::kHonest) {
      return FieldError("byzantine", "strategy must not be honest");
    }
  }
  if (s.block_size_limit < 1) {
    return FieldError("block_size_limit", "must be >= 1");
  }
  if (s.degree < 1 || s.degree >= s.nodes_total) {
    return FieldError("degree", "must be in [1, nodes_total)");
  }
  if (s.full_fanout < 1) return FieldError("full_fanout", "must be >= 1");
  if (!(s.latency_min_ms >= 0)) {
    return FieldError("latency_min_ms", "must be >= 0");
  }
  if (!(s.latency_max_ms >= s.latency_min_ms && s.latency_max_ms > 0)) {
    return FieldError("latency_max_ms", "must be > 0 and >= latency_min_ms");
  }
  if (!(s.bandwidth_bytes_per_ms > 0)) {
    return FieldError("bandwidth_bytes_per_ms", "must be > 0");
  }
  if (s.accounts < 2) return FieldError("accounts", "must be >= 2");
  if (s.initial_balance < 1) {
    return FieldError("initial_balance", "must be >= 1");
  }
  if (!(s.arrival_rate_tps >= 0)) {
    return FieldError("arrival_rate_tps", "must be >= 0");
  }
  if (!(s.exec_ms_per_message >= 0)) {
    return FieldError("exec_ms_per_message", "must be >= 0");
  }
  if (!(s.validate_ms_per_message >= 0)) {
    return FieldError("validate_ms_per_message", "must be >= 0");
  }
  if (!(s.proof_ms_per_step >= 0)) {
    return FieldError("proof_ms_per_step", "must be >= 0");
  }
  if (!(s.origin_check_ms >= 0)) {
    return FieldError("origin_check_ms", "must be >= 0");
  }
  if (!(s.root_block_interval_ms > 0)) {
    return FieldError("root_block_interval_ms", "must be > 0");
  }
  if (!(s.root_ms_per_digest >= 0)) {
    return FieldError("root_ms_per_digest", "must be >= 0");
  }
  if (!(s.redelivery_prob >= 0 && s.redelivery_prob <= 1)) {
    return FieldError("redelivery_prob", "must be in [0, 1]");
  }
  if (s.delivery_bound_root_blocks < 1) {
    return FieldError("delivery_bound_root_blocks", "must be >= 1");
  }
  if (!(s.max_sim_ms > 0)) return FieldError("max_sim_ms", "must be > 0");
  if (s.shard_count > 1 && s.cross_chain_ratio > 0) {
    std::set<ChainId> chains;
    for (std::uint64_t a = 1; a <= s.accounts && chains.size() < 2; ++a) {
      chains.insert(accounts::ChainOf(Address{a}, s.shard_count));
    }
    if (chains.size() < 2) {
      return FieldError("accounts", "too few to populate two chains");
    }
  }
  return absl::OkStatus();
}

Scenario Normalize(Scenario s) {
  if (s.shard_count == 1) s.cross_chain_ratio = 0;
  return s;
}

namespace {

template <typename T>
absl::Status ReadField(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) return FieldError(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) return FieldError(key, "expected an integer");
      if (it->is_number_unsigned()) {
        if (it->template get<std::uint64_t>() >
            static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
          return FieldError(key, "out of range");
        }
      } else if (it->template get<std::int64_t>() < 0) {
        return FieldError(key, "must be >= 0");
      }
    } else {
      if (!it->is_number()) return FieldError(key, "expected a number");
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    return FieldError(key, e.what());
  }
  return absl::OkStatus();
}

const std::set<std::string>& KnownKeys() {
  static const auto* keys = new std::set<std::string>{
      "seed", "shard_count", "nodes_total", "committee_size", "epoch_rounds",
      "tx_count", "cross_chain_ratio", "byzantine", "block_size_limit",
      "degree", "full_fanout", "latency_min_ms", "latency_max_ms",
      "bandwidth_bytes_per_ms", "accounts", "initial_balance",
      "stake_per_node", "arrival_rate_tps", "message_bytes", "header_bytes",
      "exec_ms_per_message", "validate_ms_per_message",
      "proof_ms_per_step", "origin_check_ms", "root_block_interval_ms", "root_ms_per_digest",
      "redelivery_prob",
      "merge_outer_relays", "delivery_bound_root_blocks", "max_sim_ms"};
  return *keys;
}

}  // namespace

absl::StatusOr<Scenario> ScenarioFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("scenario must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!KnownKeys().contains(key)) return FieldError(key, "unknown field");
  }
  Scenario s;
  absl::Status st;
#define THINKEY_READ(field)                                   \
  if (st = ReadField(j, #field, s.field); !st.ok()) return st
  THINKEY_READ(seed);
  THINKEY_READ(shard_count);
  THINKEY_READ(nodes_total);
  THINKEY_READ(committee_size);
  THINKEY_READ(epoch_rounds);
  THINKEY_READ(tx_count);
  THINKEY_READ(cross_chain_ratio);
  THINKEY_READ(block_size_limit);
  THINKEY_READ(degree);
  THINKEY_READ(full_fanout);
  THINKEY_READ(latency_min_ms);
  THINKEY_READ(latency_max_ms);
  THINKEY_READ(bandwidth_bytes_per_ms);
  THINKEY_READ(accounts);
  THINKEY_READ(initial_balance);
  THINKEY_READ(stake_per_node);
  THINKEY_READ(arrival_rate_tps);
  THINKEY_READ(message_bytes);
  THINKEY_READ(header_bytes);
  THINKEY_READ(exec_ms_per_message);
  THINKEY_READ(validate_ms_per_message);
  THINKEY_READ(proof_ms_per_step);
  THINKEY_READ(origin_check_ms);
  THINKEY_READ(root_block_interval_ms);
  THINKEY_READ(root_ms_per_digest);
  THINKEY_READ(redelivery_prob);
  THINKEY_READ(merge_outer_relays);
  THINKEY_READ(delivery_bound_root_blocks);
  THINKEY_READ(max_sim_ms);
#undef THINKEY_READ
  if (auto it = j.find("byzantine"); it != j.end()) {
    if (!it->is_array()) return FieldError("byzantine", "expected an array");
    for (const json& b : *it) {
      if (!b.is_object() || !b.contains("node") || !b.contains("strategy") ||
          !b["node"].is_number_unsigned() || !b["strategy"].is_string()) {
        return FieldError("byzantine",
                          "entries need an unsigned \"node\" and a \"strategy\"");
      }
      auto strategy = consensus::ParseStrategy(b["strategy"].get<std::string>());
      if (!strategy) {
        return FieldError("byzantine",
                          absl::StrCat("unknown strategy \"",
                                       b["strategy"].get<std::string>(), "\""));
      }
      s.byzantine.push_back({b["node"].get<NodeId>(), *strategy});
    }
  }
  if (absl::Status v = Validate(s); !v.ok()) return v;
  return Normalize(s);
}

ordered_json ScenarioToJson(const Scenario& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["shard_count"] = s.shard_count;
  j["nodes_total"] = s.nodes_total;
  j["committee_size"] = s.committee_size;
  j["epoch_rounds"] = s.epoch_rounds;
  j["tx_count"] = s.tx_count;
  j["cross_chain_ratio"] = s.cross_chain_ratio;
  j["byzantine"] = ordered_json::array();
  for (const ByzantineNode& b : s.byzantine) {
    j["byzantine"].push_back(
        {{"node", b.node}, {"strategy", consensus::StrategyName(b.strategy)}});
  }
  j["block_size_limit"] = s.block_size_limit;
  j["degree"] = s.degree;
  j["full_fanout"] = s.full_fanout;
  j["latency_min_ms"] = s.latency_min_ms;
  j["latency_max_ms"] = s.latency_max_ms;
  j["bandwidth_bytes_per_ms"] = s.bandwidth_bytes_per_ms;
  j["accounts"] = s.accounts;
  j["initial_balance"] = s.initial_balance;
  j["stake_per_node"] = s.stake_per_node;
  j["arrival_rate_tps"] = s.arrival_rate_tps;
  j["message_bytes"] = s.message_bytes;
  j["header_bytes"] = s.header_bytes;
  j["exec_ms_per_message"] = s.exec_ms_per_message;
  j["validate_ms_per_message"] = s.validate_ms_per_message;
  j["proof_ms_per_step"] = s.proof_ms_per_step;
  j["origin_check_ms"] = s.origin_check_ms;
  j["root_block_interval_ms"] = s.root_block_interval_ms;
  j["root_ms_per_digest"] = s.root_ms_per_digest;
  j["redelivery_prob"] = s.redelivery_prob;
  j["merge_outer_relays"] = s.merge_outer_relays;
  j["delivery_bound_root_blocks"] = s.delivery_bound_root_blocks;
  j["max_sim_ms"] = s.max_sim_ms;
  return j;
}

absl::StatusOr<Scenario> LoadScenario(std::istream& in) {
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  if (j.is_object() && j.contains("scenario") && j.contains("code_version")) {
    return ScenarioFromJson(j["scenario"]);
  }
  return ScenarioFromJson(j);
}

absl::StatusOr<Workload> GenerateWorkload(std::uint64_t accounts,
                                          std::uint64_t tx_count,
                                          std::uint32_t shard_count,
                                          double cross_chain_ratio,
                                          std::uint64_t seed) {
  if (accounts < 2) return FieldError("accounts", "must be >= 2");
  if (shard_count < 1) return FieldError("shard_count", "must be >= 1");
  if (!(cross_chain_ratio >= 0 && cross_chain_ratio <= 1)) {
    return FieldError("cross_chain_ratio", "must be in [0, 1]");
  }
  if (shard_count == 1) cross_chain_ratio = 0;
  std::vector<std::vector<Address>> by_chain(shard_count);
  for (std::uint64_t a = 1; a <= accounts; ++a) {
    by_chain[accounts::ChainOf(Address{a}, shard_count)].push_back(Address{a});
  }
  std::vector<ChainId> populated;
  for (ChainId c = 0; c < shard_count; ++c) {
    if (!by_chain[c].empty()) populated.push_back(c);
  }
  const auto cross_count =
      static_cast<std::uint64_t>(std::llround(cross_chain_ratio *
                                              static_cast<double>(tx_count)));
  if (cross_count > 0 && populated.size() < 2) {
    return FieldError("accounts", "too few to populate two chains");
  }

  DeterministicRng rng(MixKey(seed, {0x776f726b}));
  std::vector<bool> cross(tx_count, false);
  {
    std::vector<std::uint64_t> idx(tx_count);
    for (std::uint64_t i = 0; i < tx_count; ++i) idx[i] = i;
    rng.Shuffle(idx);
    for (std::uint64_t i = 0; i < cross_count; ++i) cross[idx[i]] = true;
  }

  Workload w;
  w.accounts = accounts;
  w.shard_count = shard_count;
  w.cross_chain_ratio = cross_chain_ratio;
  w.seed = seed;
  w.payments.reserve(tx_count);
  std::unordered_map<std::uint64_t, std::uint64_t> nonces;
  for (std::uint64_t i = 0; i < tx_count; ++i) {
    // Payer chains rotate so every chain carries the same share of load.
    const ChainId pc = populated[i % populated.size()];
    const auto& local = by_chain[pc];
    const Address payer = local[rng.Uniform(local.size())];
    Address payee = payer;
    if (cross[i]) {
      ChainId qc = pc;
      while (qc == pc) qc = populated[rng.Uniform(populated.size())];
      payee = by_chain[qc][rng.Uniform(by_chain[qc].size())];
    } else if (local.size() > 1) {
      while (payee == payer) payee = local[rng.Uniform(local.size())];
    }
    Payment p;
    p.from = payer;
    p.to = payee;
    p.nonce = nonces[payer.value]++;
    p.bill = 1 + rng.Uniform(100);
    w.payments.push_back(p);
  }
  return w;
}

double CrossFraction(const Workload& w) {
  if (w.payments.empty()) return 0;
  std::uint64_t cross = 0;
  for (const Payment& p : w.payments) {
    cross += accounts::ChainOf(p.from, w.shard_count) !=
             accounts::ChainOf(p.to, w.shard_count);
  }
  return static_cast<double>(cross) / static_cast<double>(w.payments.size());
}

void WriteWorkloadJsonl(std::ostream& out, const Workload& w) {
  ordered_json h;
  h["type"] = "workload";
  h["accounts"] = w.accounts;
  h["shard_count"] = w.shard_count;
  h["cross_chain_ratio"] = w.cross_chain_ratio;
  h["seed"] = w.seed;
  h["tx_count"] = w.payments.size();
  out << h.dump() << '\n';
  for (const Payment& p : w.payments) {
    ordered_json j;
    j["from"] = p.from.value;
    j["to"] = p.to.value;
    j["nonce"] = p.nonce;
    j["bill"] = p.bill;
    out << j.dump() << '\n';
  }
}

absl::StatusOr<Workload> ReadWorkloadJsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return absl::InvalidArgumentError("empty workload");
  Workload w;
  try {
    json h = json::parse(line);
    if (h.value("type", "") != "workload") {
      return absl::InvalidArgumentError("missing workload header line");
    }
    w.accounts = h.at("accounts").get<std::uint64_t>();
    w.shard_count = h.at("shard_count").get<std::uint32_t>();
    w.cross_chain_ratio = h.at("cross_chain_ratio").get<double>();
    w.seed = h.at("seed").get<std::uint64_t>();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        return absl::InvalidArgumentError(
            absl::StrCat("workload line ", line_no, " is not JSON"));
      }
      Payment p;
      p.from = Address{j.at("from").get<std::uint64_t>()};
      p.to = Address{j.at("to").get<std::uint64_t>()};
      p.nonce = j.at("nonce").get<std::uint64_t>();
      p.bill = j.at("bill").get<std::uint64_t>();
      w.payments.push_back(p);
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("workload: ", e.what()));
  }
  return w;
}

const char* ViolationKindName(ViolationKind k) {
  switch (k) {
    case ViolationKind::kSafety:
      return "safety";
    case ViolationKind::kConservation:
      return "conservation";
    case ViolationKind::kDoubleExecution:
      return "double_execution";
    case ViolationKind::kIncomplete:
      return "incomplete";
  }
  return "unknown";
}

int RunResult::exit_code() const {
  auto has = [this](ViolationKind k) {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  };
  if (has(ViolationKind::kSafety)) return kExitSafety;
  if (has(ViolationKind::kConservation)) return kExitConservation;
  if (has(ViolationKind::kDoubleExecution)) return kExitDoubleExecution;
  if (has(ViolationKind::kIncomplete)) return kExitIncomplete;
  return kExitOk;
}

namespace {

using BlockKey = std::pair<ChainId, std::uint64_t>;

constexpr NodeId kRootNode = std::numeric_limits<NodeId>::max();
constexpr std::uint32_t kMaxBackoff = 5;
constexpr std::size_t kProofStepBytes = 33;
// Rounds before the end of a term at which the chain asks for an election.
constexpr std::uint32_t kSignalLeadRounds = 2;

struct Candidate {
  accounts::BlockContents contents;
  chain::Block block;
  consensus::Proposal proposal;
};

struct ChainRun {
  chain::ChainState state;
  committee::Committee committee;
  std::uint64_t epoch = 0;
  std::uint32_t round_in_epoch = 0;
  std::uint64_t round = 0;
  std::deque<Message> mempool;
  std::uint32_t backoff = 0;
  std::unique_ptr<consensus::RoundEngine> engine;
  bool busy = false;
  bool signaled = false;
  // Elected successor waiting for its registration on the root chain.
  bool handover = false;
  std::vector<Message> taken_relays;
  std::vector<Message> taken_externals;
  std::map<Hash256, Candidate> candidates;
};

struct TxRecord {
  ChainId chain = 0;
  bool cross = false;
  SimTime submit_t = 0;
  std::optional<SimTime> confirm_t;
};

struct BlockRecord {
  ChainId chain = 0;
  std::uint64_t height = 0;
  std::uint64_t epoch = 0;
  std::uint64_t round = 0;
  std::size_t inputs = 0;
  std::size_t relay_inputs = 0;
  std::size_t outer_relays = 0;
  // Inputs plus emitted relays.
  std::size_t messages = 0;
  std::size_t bytes = 0;
  SimTime start_t = 0;
  SimTime decided_t = 0;
  std::optional<SimTime> confirm_t;
};

// One committee term of one chain.
struct EpochLog {
  SimTime start_t = 0;
  SimTime end_t = 0;
  // First round start and last decision; the committee's service time.
  std::optional<SimTime> first_round_t;
  SimTime last_round_t = 0;
  std::uint32_t rounds = 0;
  bool ended = false;
};

class Runner {
 public:
  Runner(const Scenario& s, const Workload& w)
      : s_(s),
        w_(w),
        sim_(/*record_log=*/false),
        signer_(MixKey(s.seed, {0x6b6579})),
        root_(signer_),
        router_(s.shard_count),
        latency_{s.latency_min_ms, s.latency_max_ms} {}

  absl::StatusOr<RunResult> Execute();

 private:
  std::size_t MessageBytes(const Message& m) const;
  consensus::Proposal Describe(const Candidate& c) const;
  std::optional<Candidate> Build(ChainId c, std::span<const Message> inputs);
  consensus::ConsensusConfig ConsensusFor(ChainId c) const;
  bool HasWork(ChainId c) const;
  void Wake(ChainId c);
  void StartRound(ChainId c);
  void OnRoundComplete(ChainId c, const consensus::RoundResult& r);
  void Commit(ChainId c, Candidate& cand, const consensus::RoundResult& r);
  void Abort(ChainId c);
  void MaybeSignal(ChainId c);
  void TryHandover(ChainId c);
  void StartEpoch(ChainId c, const committee::Committee& next);
  void ScheduleRoot();
  void RootTick();
  bool Finished() const;
  std::uint64_t TotalValue() const;
  void CheckConservation();
  void Fail(absl::Status s) {
    if (error_.ok()) error_ = std::move(s);
  }
  void AddViolation(ViolationKind kind, std::string detail) {
    violations_.push_back({kind, std::move(detail)});
  }
  std::string BuildTrace();

  const Scenario& s_;
  const Workload& w_;
  sim::Simulator sim_;
  consensus::Signer signer_;
  committee::StakeRegistry registry_;
  committee::ElectionBook book_;
  committee::Seed seed_;
  crosschain::RootLedger root_;
  crosschain::RelayRouter router_;
  sim::LatencyRange latency_;
  std::map<NodeId, consensus::Strategy> byzantine_;
  std::vector<ChainRun> chains_;
  bool root_scheduled_ = false;
  std::vector<committee::Committee> registrations_;
  SimTime next_root_delay_ = 0;
  std::uint64_t arrivals_pending_ = 0;
  absl::Status error_;

  std::vector<TxRecord> txs_;
  std::unordered_map<Hash256, std::size_t> tx_of_external_;
  std::unordered_map<Hash256, std::vector<std::size_t>> txs_of_relay_;
  std::map<BlockKey, std::vector<std::size_t>> awaiting_;
  std::uint64_t tx_unconfirmed_ = 0;
  std::vector<BlockRecord> blocks_;
  std::map<BlockKey, std::size_t> block_index_;
  std::map<std::pair<std::uint64_t, ChainId>, EpochLog> epochs_;
  std::vector<std::string> round_lines_;
  std::vector<SimTime> root_times_;
  std::vector<Violation> violations_;
  bool conservation_reported_ = false;
  RunMetrics m_;
};

std::size_t Runner::MessageBytes(const Message& m) const {
  std::size_t bytes = s_.message_bytes;
  if (const auto* ref = std::get_if<accounts::RelayProofRef>(&m.verification)) {
    bytes += kProofStepBytes * ref->proof.siblings.size();
  }
  return bytes;
}

consensus::Proposal Runner::Describe(const Candidate& c) const {
  consensus::Proposal p;
  p.block_hash = chain::BlockHash(c.block);
  std::size_t bytes = s_.header_bytes;
  for (const Message& m : c.block.input_messages) bytes += MessageBytes(m);
  bytes += s_.message_bytes *
           (c.block.inter_relay.size() + c.block.outer_relay.size());
  p.bytes = bytes;
  // Every message the block carries is executed or emitted once.
  const double work = static_cast<double>(c.block.input_messages.size() +
                                          c.block.inter_relay.size() +
                                          c.block.outer_relay.size());
  double proof_steps = 0;
  std::set<BlockKey> origins;
  for (const Message& m : c.block.input_messages) {
    if (const auto* ref = std::get_if<accounts::RelayProofRef>(&m.verification)) {
      proof_steps += static_cast<double>(ref->proof.siblings.size());
      origins.insert({ref->origin_chain, ref->origin_height});
    }
  }
  // Leader and validators both check relay proofs and origin digests.
  const double proof_ms = s_.proof_ms_per_step * proof_steps +
                          s_.origin_check_ms * static_cast<double>(origins.size());
  p.build_ms = s_.exec_ms_per_message * work + proof_ms;
  p.validate_ms = s_.validate_ms_per_message * work + proof_ms;
  p.valid = true;
  return p;
}

std::optional<Candidate> Runner::Build(ChainId c,
                                       std::span<const Message> inputs) {
  ChainRun& ch = chains_[c];
  accounts::ExecutionConfig cfg;
  cfg.merge_outer_relays = s_.merge_outer_relays;
  absl::StatusOr<accounts::BlockContents> contents =
      accounts::ExecuteBlock(ch.state, inputs, cfg);
  if (!contents.ok()) {
    Fail(contents.status());
    return std::nullopt;
  }
  absl::StatusOr<chain::Block> block = accounts::SealBlock(ch.state, *contents);
  if (!block.ok()) {
    Fail(block.status());
    return std::nullopt;
  }
  Candidate cand{std::move(*contents), std::move(*block), {}};
  cand.proposal = Describe(cand);
  accounts::BlockVerdict verdict = accounts::ValidateBlock(
      cand.block, ch.state,
      [this](const Message& m) { return crosschain::VerifyRelay(m, root_); });
  cand.proposal.valid = verdict.ok();
  return cand;
}

consensus::ConsensusConfig Runner::ConsensusFor(ChainId c) const {
  consensus::ConsensusConfig cfg;
  cfg.latency = latency_;
  cfg.bandwidth_bytes_per_ms = s_.bandwidth_bytes_per_ms;
  const double limit = s_.block_size_limit;
  const double max_bytes =
      s_.header_bytes + limit * 3.0 * (s_.message_bytes + kProofStepBytes * 16);
  cfg.max_block_allowance_ms =
      limit * 2.0 * (s_.exec_ms_per_message + s_.validate_ms_per_message) +
      max_bytes / s_.bandwidth_bytes_per_ms;
  cfg.backoff_exponent = chains_[c].backoff;
  cfg.key_seed = MixKey(s_.seed, {0x6b6579});
  cfg.network_seed = MixKey(s_.seed, {0x6e6574});
  cfg.chain_id = c;
  return cfg;
}

bool Runner::HasWork(ChainId c) const {
  const ChainRun& ch = chains_[c];
  return !ch.mempool.empty() || router_.pending(c) > 0 ||
         !ch.state.carried.empty();
}

void Runner::Wake(ChainId c) {
  if (chains_[c].busy || !HasWork(c)) return;
  chains_[c].busy = true;
  sim_.After(0.0, c, "round-start", [this, c] { StartRound(c); });
}

void Runner::MaybeSignal(ChainId c) {
  ChainRun& ch = chains_[c];
  if (ch.signaled || ch.round_in_epoch + kSignalLeadRounds < s_.epoch_rounds) {
    return;
  }
  book_.RecordSignal(c, ch.epoch + 1, root_.height());
  ch.signaled = true;
}

void Runner::StartRound(ChainId c) {
  ChainRun& ch = chains_[c];
  if (!error_.ok()) return;
  ch.taken_relays =
      router_.TakePending(ch.state, root_, s_.block_size_limit);
  ch.taken_externals.clear();
  // The limit counts every message the block carries. A relay input emits
  // nothing; a payment emits one relay, local or outer.
  std::size_t slots = ch.taken_relays.size();
  while (!ch.mempool.empty() &&
         (slots + 2 <= s_.block_size_limit ||
          (slots == 0 && ch.taken_externals.empty()))) {
    ch.taken_externals.push_back(std::move(ch.mempool.front()));
    ch.mempool.pop_front();
    slots += 2;
  }
  std::vector<Message> inputs = ch.taken_relays;
  inputs.insert(inputs.end(), ch.taken_externals.begin(),
                ch.taken_externals.end());
  if (inputs.empty() && ch.state.carried.empty()) {
    ch.busy = false;
    return;
  }
  MaybeSignal(c);

  ch.candidates.clear();
  std::optional<Candidate> primary = Build(c, inputs);
  if (!primary) return;
  const Hash256 primary_hash = primary->proposal.block_hash;
  ch.candidates.emplace(primary_hash, std::move(*primary));

  auto source = [this, c, primary_hash, inputs](std::uint64_t, NodeId,
                                                int variant) {
    ChainRun& chr = chains_[c];
    if (variant == 0) return chr.candidates.at(primary_hash).proposal;
    std::span<const Message> fewer(inputs.data(),
                                   inputs.empty() ? 0 : inputs.size() - 1);
    std::optional<Candidate> alt = Build(c, fewer);
    if (!alt) return chr.candidates.at(primary_hash).proposal;
    consensus::Proposal p = alt->proposal;
    chr.candidates.emplace(p.block_hash, std::move(*alt));
    return p;
  };

  std::map<NodeId, consensus::Strategy> byz;
  for (NodeId n : ch.committee.members) {
    auto it = byzantine_.find(n);
    if (it != byzantine_.end()) byz.emplace(n, it->second);
  }
  ch.engine = std::make_unique<consensus::RoundEngine>(
      sim_, ch.committee, ch.round, ConsensusFor(c), std::move(byz),
      std::move(source), MixKey(s_.seed, {0x616476, c, ch.round}));
  ch.engine->Start([this, c](const consensus::RoundResult& r) {
    OnRoundComplete(c, r);
  });
}

void Runner::OnRoundComplete(ChainId c, const consensus::RoundResult& r) {
  ChainRun& ch = chains_[c];
  ch.engine.reset();
  ++m_.rounds;
  if (r.safety_violated()) {
    AddViolation(ViolationKind::kSafety,
                 absl::StrCat("chain ", c, " round ", r.round,
                              ": honest members decided different blocks"));
  }
  std::set<NodeId> offenders;
  for (const consensus::Offense& o : r.punished()) offenders.insert(o.node);
  for (NodeId n : offenders) {
    m_.burned += registry_.Punish(n, ConsensusFor(c).penalty_fraction);
    ++m_.punished_nodes;
  }

  std::optional<Hash256> agreed = r.agreed();
  auto cand = agreed ? ch.candidates.find(*agreed) : ch.candidates.end();
  const bool committed = cand != ch.candidates.end();
  {
    ordered_json j;
    j["type"] = "round";
    j["chain"] = c;
    j["round"] = r.round;
    j["epoch"] = ch.epoch;
    j["leader"] = r.leader;
    j["outcome"] = committed ? "agreed" : "empty";
    j["start_t"] = r.started_at;
    j["end_t"] = r.completed_at;
    j["punished"] = std::vector<NodeId>(offenders.begin(), offenders.end());
    round_lines_.push_back(j.dump());
  }
  if (committed) {
    Commit(c, cand->second, r);
    m_.block_times_ms.push_back(r.completed_at - r.started_at);
    ch.backoff = 0;
  } else {
    Abort(c);
    ++m_.empty_rounds;
    ch.backoff = std::min(ch.backoff + 1, kMaxBackoff);
  }
  ch.candidates.clear();

  EpochLog& log = epochs_[{ch.epoch, c}];
  ++log.rounds;
  if (!log.first_round_t) log.first_round_t = r.started_at;
  log.last_round_t = r.completed_at;
  ++ch.round;
  ++ch.round_in_epoch;
  if (ch.round_in_epoch >= s_.epoch_rounds) TryHandover(c);

  if (!ch.handover) {
    ch.busy = false;
    Wake(c);
  }
  ScheduleRoot();
}

void Runner::Commit(ChainId c, Candidate& cand,
                    const consensus::RoundResult& r) {
  ChainRun& ch = chains_[c];
  chain::Block& block = cand.block;
  const Hash256 hash = chain::BlockHash(block);

  // Inputs the decided block left out go back to their queues.
  std::set<Hash256> included;
  for (const Message& m : block.input_messages) included.insert(m.id);
  std::vector<Message> back_relays;
  for (Message& m : ch.taken_relays) {
    if (!included.contains(m.id)) back_relays.push_back(std::move(m));
  }
  router_.Requeue(c, std::move(back_relays));
  for (auto it = ch.taken_externals.rbegin(); it != ch.taken_externals.rend();
       ++it) {
    if (!included.contains(it->id)) ch.mempool.push_front(std::move(*it));
  }
  ch.taken_relays.clear();
  ch.taken_externals.clear();

  std::set<NodeId> signers;
  for (const auto& [node, d] : r.decisions) {
    if (d.outcome != consensus::Outcome::kAgreedBlock || d.block_hash != hash) {
      continue;
    }
    for (const consensus::SignedMessage& v : d.proof) {
      if (v.payload == hash) signers.insert(v.signer);
    }
    break;
  }
  std::vector<NodeId> signer_list(signers.begin(), signers.end());
  block.committee_proof =
      crosschain::Attest(signer_, ch.committee, signer_list, hash);
  if (absl::Status st = accounts::CommitBlock(ch.state, block, cand.contents);
      !st.ok()) {
    Fail(st);
    return;
  }
  const SimTime now = sim_.now();
  router_.OnBlockDecided(block, now);
  router_.OnBlockCommitted(block, now);
  ++m_.blocks;
  m_.block_sizes.push_back(static_cast<double>(
      block.input_messages.size() + block.inter_relay.size() +
      block.outer_relay.size()));

  const BlockKey key{c, block.height};
  BlockRecord rec;
  rec.chain = c;
  rec.height = block.height;
  rec.epoch = ch.epoch;
  rec.round = r.round;
  rec.inputs = block.input_messages.size();
  rec.outer_relays = block.outer_relay.size();
  rec.messages = rec.inputs + block.inter_relay.size() + rec.outer_relays;
  rec.bytes = cand.proposal.bytes;
  rec.start_t = r.started_at;
  rec.decided_t = r.completed_at;

  std::unordered_map<Hash256, const accounts::ProcedureStep*> steps;
  for (const accounts::ProcessingProcedure& p : block.procedures) {
    for (const accounts::ProcedureStep& st : p.steps) steps[st.received] = &st;
  }
  std::unordered_set<Hash256> outer_ids;
  for (const Message& m : block.outer_relay) outer_ids.insert(m.id);
  std::vector<std::size_t>& waiting = awaiting_[key];
  for (const Message& m : block.input_messages) {
    if (std::holds_alternative<accounts::RelayProofRef>(m.verification)) {
      ++rec.relay_inputs;
      auto it = txs_of_relay_.find(m.id);
      if (it != txs_of_relay_.end()) {
        waiting.insert(waiting.end(), it->second.begin(), it->second.end());
        txs_of_relay_.erase(it);
      }
      if (s_.redelivery_prob > 0 &&
          KeyedUnit(s_.seed, {0x726564, m.id.Prefix64()}) < s_.redelivery_prob) {
        router_.Redeliver(m);
      }
      continue;
    }
    auto tx = tx_of_external_.find(m.id);
    if (tx == tx_of_external_.end()) continue;
    // A cross-chain payment settles with the relay that carries its value.
    std::optional<Hash256> relay;
    auto step = steps.find(m.id);
    if (txs_[tx->second].cross && step != steps.end() && !step->second->fault) {
      for (const Hash256& e : step->second->emitted) {
        if (outer_ids.contains(e)) relay = e;
      }
      if (!relay && !m.input.args.empty()) {
        const Address payee{m.input.args[0]};
        for (const Message& o : block.outer_relay) {
          if (o.to == payee && o.input.kind == accounts::kAdd) relay = o.id;
        }
      }
    }
    if (relay) {
      txs_of_relay_[*relay].push_back(tx->second);
    } else {
      waiting.push_back(tx->second);
    }
  }
  block_index_.emplace(key, blocks_.size());
  blocks_.push_back(rec);

  const crosschain::DigestMessage digest = crosschain::MakeDigestMessage(block);
  sim_.After(latency_.mean(), kRootNode, "digest", [this, digest] {
    if (!root_.SubmitDigest(digest).ok()) ++m_.digest_rejections;
    ScheduleRoot();
  });
}

void Runner::Abort(ChainId c) {
  ChainRun& ch = chains_[c];
  router_.Requeue(c, std::move(ch.taken_relays));
  for (auto it = ch.taken_externals.rbegin(); it != ch.taken_externals.rend();
       ++it) {
    ch.mempool.push_front(std::move(*it));
  }
  ch.taken_relays.clear();
  ch.taken_externals.clear();
}

void Runner::TryHandover(ChainId c) {
  ChainRun& ch = chains_[c];
  MaybeSignal(c);
  std::optional<committee::Seed> seed = book_.SeedFor(c, ch.epoch + 1);
  // Without a fresh seed the current committee stays in office.
  if (!seed) return;
  absl::StatusOr<committee::Committee> next =
      committee::Elect(*seed, c, registry_, s_.committee_size);
  if (!next.ok()) return;
  next->epoch = ch.epoch + 1;
  // The successor takes office once a root block records its keys.
  ch.handover = true;
  ++m_.handovers;
  sim_.After(latency_.mean(), kRootNode, "register",
             [this, committee = *next] {
               registrations_.push_back(committee);
               ScheduleRoot();
             });
}

void Runner::StartEpoch(ChainId c, const committee::Committee& next) {
  ChainRun& ch = chains_[c];
  EpochLog& done = epochs_[{ch.epoch, c}];
  done.ended = true;
  done.end_t = sim_.now();
  ++ch.epoch;
  ch.round_in_epoch = 0;
  ch.signaled = false;
  ch.committee = next;
  ch.handover = false;
  epochs_[{ch.epoch, c}].start_t = sim_.now();
  ch.busy = false;
  Wake(c);
  ScheduleRoot();
}

void Runner::ScheduleRoot() {
  if (root_scheduled_ || Finished()) return;
  root_scheduled_ = true;
  const SimTime delay = std::max(next_root_delay_, s_.root_block_interval_ms);
  sim_.After(delay, kRootNode, "root-block", [this] { RootTick(); });
}

void Runner::RootTick() {
  root_scheduled_ = false;
  const SimTime now = sim_.now();
  crosschain::RootLedger::RootBlock rb = root_.SealRootBlock(now);
  ++m_.root_blocks;
  const std::size_t registered = registrations_.size();
  for (committee::Committee& next : registrations_) {
    root_.RegisterCommittee(next);
    const ChainId c = next.chain_id;
    sim_.After(latency_.mean(), c, "epoch-start",
               [this, c, next] { StartEpoch(c, next); });
  }
  registrations_.clear();
  root_times_.push_back(now);
  seed_ = committee::NextSeed(seed_);
  book_.PublishSeed(rb.height, seed_);
  for (const chain::Digest& d : rb.recorded) {
    const BlockKey key{d.chain_id, d.height};
    if (auto it = block_index_.find(key); it != block_index_.end()) {
      blocks_[it->second].confirm_t = now;
    }
    auto waiting = awaiting_.find(key);
    if (waiting == awaiting_.end()) continue;
    for (std::size_t tx : waiting->second) {
      if (!txs_[tx].confirm_t) {
        txs_[tx].confirm_t = now;
        --tx_unconfirmed_;
      }
    }
    awaiting_.erase(waiting);
  }
  router_.Release(root_, now);
  CheckConservation();
  for (ChainId c = 0; c < s_.shard_count; ++c) Wake(c);
  next_root_delay_ =
      s_.root_block_interval_ms +
      s_.root_ms_per_digest *
          static_cast<double>(rb.recorded.size() + registered);
  ScheduleRoot();
}

bool Runner::Finished() const {
  if (tx_unconfirmed_ > 0 || arrivals_pending_ > 0) return false;
  if (root_.pending() > 0 || router_.held() > 0) return false;
  if (!registrations_.empty()) return false;
  for (ChainId c = 0; c < s_.shard_count; ++c) {
    if (chains_[c].busy || chains_[c].handover || HasWork(c)) return false;
  }
  return true;
}

std::uint64_t Runner::TotalValue() const {
  std::uint64_t total = 0;
  for (const ChainRun& ch : chains_) {
    for (const auto& [addr, acct] : ch.state.accounts) total += acct.balance;
    for (const auto& [id, m] : ch.state.carried) {
      total += accounts::CarriedValue(m);
    }
  }
  total += router_.InFlightValue();
  total += registry_.total_frozen();
  total += registry_.total_burned();
  return total;
}

void Runner::CheckConservation() {
  if (conservation_reported_) return;
  const std::uint64_t total = TotalValue();
  if (total != m_.genesis_value) {
    conservation_reported_ = true;
    AddViolation(ViolationKind::kConservation,
                 absl::StrCat("total value ", total, " at t=", sim_.now(),
                              ", genesis ", m_.genesis_value));
  }
}

std::string Runner::BuildTrace() {
  std::ostringstream out;
  {
    ordered_json j;
    j["type"] = "run";
    j["seed"] = s_.seed;
    j["shard_count"] = s_.shard_count;
    j["cross_ratio"] = s_.cross_chain_ratio;
    j["tx_count"] = txs_.size();
    j["block_size_limit"] = s_.block_size_limit;
    j["committee_size"] = s_.committee_size;
    out << j.dump() << '\n';
  }
  for (const std::string& line : round_lines_) out << line << '\n';
  auto opt = [](const std::optional<SimTime>& t) {
    return t ? ordered_json(*t) : ordered_json(nullptr);
  };
  for (const BlockRecord& b : blocks_) {
    ordered_json j;
    j["type"] = "block";
    j["chain"] = b.chain;
    j["height"] = b.height;
    j["epoch"] = b.epoch;
    j["round"] = b.round;
    j["inputs"] = b.inputs;
    j["relay_inputs"] = b.relay_inputs;
    j["outer_relays"] = b.outer_relays;
    j["messages"] = b.messages;
    j["bytes"] = b.bytes;
    j["start_t"] = b.start_t;
    j["decided_t"] = b.decided_t;
    j["confirm_t"] = opt(b.confirm_t);
    out << j.dump() << '\n';
  }
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    ordered_json j;
    j["type"] = "tx";
    j["id"] = i;
    j["chain"] = txs_[i].chain;
    j["cross"] = txs_[i].cross;
    j["submit_t"] = txs_[i].submit_t;
    j["confirm_t"] = opt(txs_[i].confirm_t);
    out << j.dump() << '\n';
  }
  const std::unordered_map<Hash256, std::uint32_t>& counts =
      router_.execution_counts();
  for (const crosschain::RelayTraceRecord& r : router_.Trace()) {
    ordered_json j;
    j["type"] = "relay";
    j["msg_id"] = r.msg_id.ToHex();
    j["origin_chain"] = r.origin_chain;
    j["dest_chain"] = r.dest_chain;
    j["emitted_t"] = r.emitted_t;
    j["root_confirm_t"] = opt(r.root_confirm_t);
    j["executed_t"] = opt(r.executed_t);
    j["executions"] = counts.at(r.msg_id);
    out << j.dump() << '\n';
  }

  // Epoch time is the committees' service time, first round start to last
  // decision, averaged over chains. An epoch is full when every chain served
  // the whole term.
  std::map<std::uint64_t, std::vector<const EpochLog*>> by_epoch;
  for (const auto& [key, log] : epochs_) by_epoch[key.first].push_back(&log);
  for (const auto& [e, logs] : by_epoch) {
    bool full = logs.size() == s_.shard_count;
    SimTime start = std::numeric_limits<double>::infinity();
    SimTime end = -std::numeric_limits<double>::infinity();
    double service = 0;
    for (const EpochLog* log : logs) {
      full = full && log->ended && log->first_round_t &&
             log->rounds >= s_.epoch_rounds;
      if (!full) break;
      start = std::min(start, log->start_t);
      end = std::max(end, log->end_t);
      service += log->last_round_t - *log->first_round_t;
    }
    if (!full) continue;
    const double duration = service / static_cast<double>(logs.size());
    ordered_json j;
    j["type"] = "epoch";
    j["epoch"] = e;
    j["start_t"] = start;
    j["end_t"] = end;
    j["duration_ms"] = duration;
    j["rounds"] = s_.epoch_rounds;
    j["full"] = true;
    out << j.dump() << '\n';
    m_.epoch_ms.push_back(duration);
  }
  return out.str();
}

absl::StatusOr<RunResult> Runner::Execute() {
  for (const ByzantineNode& b : s_.byzantine) byzantine_[b.node] = b.strategy;
  for (NodeId n = 0; n < s_.nodes_total; ++n) {
    if (absl::Status st = registry_.Register(
            n, s_.stake_per_node, Sha256(absl::StrCat("thinkey-node-", n)));
        !st.ok()) {
      return st;
    }
  }
  seed_ = committee::GenesisSeed(s_.seed);
  book_.PublishSeed(0, seed_);

  std::vector<chain::AccountMap> genesis(s_.shard_count);
  for (std::uint64_t a = 1; a <= s_.accounts; ++a) {
    accounts::Account acct = accounts::NewAccount(Address{a});
    acct.balance = s_.initial_balance;
    genesis[accounts::ChainOf(Address{a}, s_.shard_count)].emplace(Address{a},
                                                                   acct);
  }
  chains_.resize(s_.shard_count);
  for (ChainId c = 0; c < s_.shard_count; ++c) {
    ChainRun& ch = chains_[c];
    ch.state = chain::GenesisState(c, s_.shard_count, std::move(genesis[c]));
    absl::StatusOr<committee::Committee> committee =
        committee::Elect(seed_, c, registry_, s_.committee_size);
    if (!committee.ok()) return committee.status();
    ch.committee = *committee;
    ch.committee.epoch = 0;
    root_.RegisterCommittee(ch.committee);
    epochs_[{0, c}].start_t = 0;
  }
  m_.genesis_value = s_.accounts * s_.initial_balance +
                     static_cast<std::uint64_t>(s_.nodes_total) *
                         s_.stake_per_node;

  txs_.resize(w_.payments.size());
  tx_unconfirmed_ = w_.payments.size();
  for (std::size_t i = 0; i < w_.payments.size(); ++i) {
    const Payment& p = w_.payments[i];
    const ChainId c = accounts::ChainOf(p.from, s_.shard_count);
    Message m = accounts::MakeExternal(p.from, p.from, p.nonce,
                                       accounts::Tran(p.to, p.bill));
    txs_[i].chain = c;
    txs_[i].cross = accounts::ChainOf(p.to, s_.shard_count) != c;
    tx_of_external_.emplace(m.id, i);
    if (s_.arrival_rate_tps > 0) {
      const SimTime at = 1000.0 * static_cast<double>(i) / s_.arrival_rate_tps;
      txs_[i].submit_t = at;
      ++arrivals_pending_;
      sim_.After(at, c, "submit", [this, c, m = std::move(m)]() mutable {
        chains_[c].mempool.push_back(std::move(m));
        --arrivals_pending_;
        Wake(c);
      });
    } else {
      chains_[c].mempool.push_back(std::move(m));
    }
  }
  for (ChainId c = 0; c < s_.shard_count; ++c) Wake(c);

  sim_.RunUntil(s_.max_sim_ms);
  if (!error_.ok()) return error_;
  m_.end_t = sim_.now();

  // Final checks.
  CheckConservation();
  m_.final_value = TotalValue();
  std::size_t double_exec = 0;
  std::size_t undelivered = 0;
  for (const Hash256& id : router_.NotExactlyOnce()) {
    if (router_.execution_counts().at(id) > 1) {
      ++double_exec;
    } else {
      ++undelivered;
    }
  }
  if (double_exec > 0) {
    AddViolation(ViolationKind::kDoubleExecution,
                 absl::StrCat(double_exec, " relay ids executed more than once"));
  }
  if (undelivered > 0) {
    AddViolation(ViolationKind::kIncomplete,
                 absl::StrCat(undelivered, " relays never executed"));
  }
  if (tx_unconfirmed_ > 0) {
    AddViolation(ViolationKind::kIncomplete,
                 absl::StrCat(tx_unconfirmed_, " transactions unconfirmed at t=",
                              m_.end_t));
  }
  std::size_t late = 0;
  for (const crosschain::RelayTraceRecord& r : router_.Trace()) {
    if (!r.root_confirm_t || !r.executed_t) continue;
    auto from = std::lower_bound(root_times_.begin(), root_times_.end(),
                                 *r.root_confirm_t);
    auto to = std::lower_bound(root_times_.begin(), root_times_.end(),
                               *r.executed_t);
    if (to - from > static_cast<std::ptrdiff_t>(s_.delivery_bound_root_blocks)) {
      ++late;
    }
  }
  if (late > 0) {
    AddViolation(ViolationKind::kIncomplete,
                 absl::StrCat(late, " relays executed later than ",
                              s_.delivery_bound_root_blocks,
                              " root blocks after confirmation"));
  }

  m_.relays = router_.execution_counts().size();
  m_.duplicates_suppressed = router_.duplicates_suppressed();
  m_.held_high_watermark = router_.held_high_watermark();
  for (const TxRecord& t : txs_) m_.tx_completed += t.confirm_t.has_value();

  {
    absl::StatusOr<sim::NetworkTopology> topo = sim::NetworkTopology::Generate(
        MixKey(s_.seed, {0x746f70}), s_.nodes_total, s_.degree);
    if (!topo.ok()) return topo.status();
    sim::GossipOptions g;
    g.seed = MixKey(s_.seed, {0x676f73});
    g.full_fanout = s_.full_fanout;
    g.latency = latency_;
    g.bandwidth_bytes_per_ms = s_.bandwidth_bytes_per_ms;
    std::vector<std::uint8_t> payload(
        s_.header_bytes +
            static_cast<std::size_t>(s_.block_size_limit) * s_.message_bytes,
        0);
    absl::StatusOr<sim::RedundancyReport> rep =
        sim::GossipBroadcast(0, payload, *topo, g);
    if (!rep.ok()) return rep.status();
    m_.gossip_mean_full_copies = rep->MeanFullCopies();
  }

  RunResult result;
  result.trace_jsonl = BuildTrace();
  std::istringstream trace(result.trace_jsonl);
  absl::StatusOr<std::vector<analysis::ReportRow>> rows =
      analysis::SummarizeTrace(trace);
  if (!rows.ok()) return rows.status();
  result.report = rows->front();
  std::ostringstream csv;
  analysis::WriteReportCsv(csv, *rows);
  result.report_csv = csv.str();
  result.metrics = std::move(m_);
  result.violations = std::move(violations_);
  return result;
}

}  // namespace

absl::StatusOr<RunResult> Run(const Scenario& scenario,
                              const Workload* workload) {
  if (absl::Status st = Validate(scenario); !st.ok()) return st;
  const Scenario s = Normalize(scenario);
  Workload generated;
  if (workload == nullptr) {
    absl::StatusOr<Workload> w = GenerateWorkload(
        s.accounts, s.tx_count, s.shard_count, s.cross_chain_ratio, s.seed);
    if (!w.ok()) return w.status();
    generated = std::move(*w);
    workload = &generated;
  }
  if (workload->shard_count != s.shard_count) {
    return FieldError("workload", "shard_count differs from the scenario");
  }
  for (const Payment& p : workload->payments) {
    if (p.from.value < 1 || p.from.value > s.accounts || p.to.value < 1 ||
        p.to.value > s.accounts) {
      return FieldError("workload", "payment names an account outside 1..accounts");
    }
  }
  Runner runner(s, *workload);
  return runner.Execute();
}

ordered_json MakeManifest(const Scenario& s, const RunResult& r) {
  ordered_json j;
  j["scenario"] = ScenarioToJson(s);
  j["code_version"] = THINKEY_VERSION;
  j["outputs"] = {{"trace.jsonl", Sha256(r.trace_jsonl).ToHex()},
                  {"report.csv", Sha256(r.report_csv).ToHex()}};
  const RunMetrics& m = r.metrics;
  ordered_json metrics;
  metrics["rounds"] = m.rounds;
  metrics["empty_rounds"] = m.empty_rounds;
  metrics["blocks"] = m.blocks;
  metrics["root_blocks"] = m.root_blocks;
  metrics["tx_completed"] = m.tx_completed;
  metrics["relays"] = m.relays;
  metrics["duplicates_suppressed"] = m.duplicates_suppressed;
  metrics["digest_rejections"] = m.digest_rejections;
  metrics["held_high_watermark"] = m.held_high_watermark;
  metrics["punished_nodes"] = m.punished_nodes;
  metrics["burned"] = m.burned;
  metrics["handovers"] = m.handovers;
  metrics["genesis_value"] = m.genesis_value;
  metrics["final_value"] = m.final_value;
  metrics["gossip_mean_full_copies"] = m.gossip_mean_full_copies;
  metrics["end_t"] = m.end_t;
  j["metrics"] = metrics;
  j["violations"] = ordered_json::array();
  for (const Violation& v : r.violations) {
    j["violations"].push_back(
        {{"kind", ViolationKindName(v.kind)}, {"detail", v.detail}});
  }
  j["exit_code"] = r.exit_code();
  return j;
}

}  // namespace thinkey::scenario
