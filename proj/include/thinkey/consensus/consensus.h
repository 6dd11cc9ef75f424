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

#ifndef THINKEY_CONSENSUS_CONSENSUS_H_
#define THINKEY_CONSENSUS_CONSENSUS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thinkey/committee/committee.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/random.h"
#include "thinkey/common/types.h"
#include "thinkey/sim/network.h"
#include "thinkey/sim/simulator.h"

namespace thinkey::consensus {

enum class Stage : std::uint8_t {
  kProposal = 0,
  kPreparation = 1,
  kConfirmation = 2,
  kDecided = 3,
};

const char* StageName(Stage s);

enum class Strategy : std::uint8_t {
  kHonest,
  // Sends nothing.
  kSilent,
  // As leader: different proposals to the two halves of the committee. As
  // member: prepare for the block to one half, a fault vote to the other.
  kEquivocate,
  // Prepare vote drawn at random (block, fault, or junk); as leader,
  // proposes an invalid block half the time.
  kRandomVote,
  // Votes correctly but only to a random subset of members.
  kSelective,
  // Broadcasts its own proposal although it is not the leader.
  kImpostor,
};

const char* StrategyName(Strategy s);
// Parses names as printed by StrategyName ("silent", "equivocate", ...).
std::optional<Strategy> ParseStrategy(const std::string& name);

// What a member learns about a proposed block. The proposal source computes
// validity once (it is deterministic) and the engine charges the costs.
struct Proposal {
  Hash256 block_hash;
  std::size_t bytes = 0;
  SimTime build_ms = 0;
  SimTime validate_ms = 0;
  bool valid = true;
};

// Called by the leader when a round starts. `variant` 0 is the block the
// leader intends; variant 1 is a conflicting alternative used by an
// equivocating leader.
using ProposalSource =
    std::function<Proposal(std::uint64_t round, NodeId leader, int variant)>;

// A stage message with its authentication tag. Payload is the proposal
// hash, the prepare vote (block hash or the fault marker) or the digest of
// a confirmation package.
struct SignedMessage {
  NodeId signer = 0;
  std::uint64_t round = 0;
  Stage stage = Stage::kProposal;
  Hash256 payload;
  Hash256 tag;

  bool operator==(const SignedMessage&) const = default;
};

// Payload of a prepare vote signalling a faulty leader.
const Hash256& FaultMarker();

// Keyed-hash signing; every member can verify every other member's tags.
class Signer {
 public:
  explicit Signer(std::uint64_t key_seed) : key_seed_(key_seed) {}
  SignedMessage Sign(NodeId signer, std::uint64_t round, Stage stage,
                     const Hash256& payload) const;
  bool Verify(const SignedMessage& m) const;

 private:
  Hash256 Key(NodeId node) const;
  std::uint64_t key_seed_;
};

struct Evidence {
  SignedMessage first;
  SignedMessage second;
};

struct Offense {
  NodeId node = 0;
  Stage stage = Stage::kProposal;

  bool operator==(const Offense&) const = default;
};

enum class Outcome : std::uint8_t { kAgreedBlock, kEmptyBlock };

struct Decision {
  std::uint64_t round = 0;
  Outcome outcome = Outcome::kEmptyBlock;
  Hash256 block_hash;
  // Prepare votes forming the certificate, or the fault votes and evidence
  // justifying an abort.
  std::vector<SignedMessage> proof;
  std::vector<Evidence> evidence;
  std::vector<Offense> punished;
  std::string justification;
  SimTime decided_at = 0;
};

struct EarlyOutput {
  Hash256 block_hash;
  std::vector<SignedMessage> proof;
  SimTime at = 0;
};

struct RoundTraceRecord {
  std::uint64_t round = 0;
  Stage stage = Stage::kProposal;
  NodeId member = 0;
  std::string action;
  SimTime t = 0;
};

void WriteRoundTraceJsonl(std::ostream& out,
                          const std::vector<RoundTraceRecord>& trace);

struct ConsensusConfig {
  sim::LatencyRange latency;
  double bandwidth_bytes_per_ms = 1250.0;
  // Timeouts are multiples of the mean link latency plus an allowance for
  // building, shipping and validating the largest admissible block.
  double proposal_timeout_factor = 4.0;
  double stage_timeout_factor = 6.0;
  SimTime max_block_allowance_ms = 0.0;
  // Each consecutive empty block doubles the timeouts.
  std::uint32_t backoff_exponent = 0;
  std::size_t vote_bytes = 96;
  bool aggregate_signatures = true;
  double penalty_fraction = 0.5;
  std::uint64_t key_seed = 1;
  std::uint64_t network_seed = 1;
  ChainId chain_id = 0;
  bool record_trace = false;

  SimTime proposal_timeout() const;
  SimTime stage_timeout() const;
  // Upper bound on the time from round start to an honest decision.
  SimTime round_budget() const;
};

struct RoundResult {
  std::uint64_t round = 0;
  NodeId leader = 0;
  SimTime started_at = 0;
  SimTime completed_at = 0;
  std::map<NodeId, Decision> decisions;         // honest members only
  std::map<NodeId, EarlyOutput> early_outputs;  // honest members only
  std::vector<RoundTraceRecord> trace;
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;

  // The agreed block if any honest member decided one.
  std::optional<Hash256> agreed() const;
  // Union of offenses across honest decisions.
  std::vector<Offense> punished() const;
  // True when honest members decided two different agreed blocks.
  bool safety_violated() const;
};

// One consensus round of one committee, driven by simulator events: the
// leader proposes, members prepare (or vote the leader faulty on timeout),
// exchange confirmation packages of the prepare signatures they saw, and
// decide. A member holding a quorum of matching prepare signatures outputs
// the block early at the end of preparation and still takes part in
// confirmation.
class RoundEngine {
 public:
  using CompletionCallback = std::function<void(const RoundResult&)>;

  RoundEngine(sim::Simulator& sim, const committee::Committee& committee,
              std::uint64_t round, ConsensusConfig config,
              std::map<NodeId, Strategy> byzantine, ProposalSource source,
              std::uint64_t adversary_seed);
  ~RoundEngine();

  RoundEngine(const RoundEngine&) = delete;
  RoundEngine& operator=(const RoundEngine&) = delete;

  // Schedules the proposal and every member's proposal timeout. The callback
  // fires once every honest member has decided.
  void Start(CompletionCallback on_complete);

  bool completed() const { return completed_; }
  const RoundResult& result() const { return result_; }

 private:
  struct Member;

  void Send(NodeId from, NodeId to, std::size_t bytes, std::uint64_t salt,
            std::function<void()> deliver);
  void Broadcast(NodeId from, std::size_t bytes, std::uint64_t salt,
                 const std::function<void(NodeId)>& deliver);
  void Trace(Stage stage, NodeId member, std::string action);

  void StartLeader();
  void StartByzantineImpostor(NodeId node);
  void OnProposal(NodeId to, const SignedMessage& msg, const Proposal& p);
  void OnProposalTimeout(NodeId node);
  void CastPrepare(NodeId node, const Hash256& payload);
  void OnPrepare(NodeId to, const SignedMessage& vote,
                 const std::optional<SignedMessage>& header);
  void EndPreparation(NodeId node);
  void OnPackage(NodeId to, const SignedMessage& pkg,
                 const std::vector<SignedMessage>& votes);
  void Decide(NodeId node);
  void ByzantineOnProposal(NodeId node, const Hash256& block_hash);
  void ByzantinePackage(NodeId node);
  void NoteProposal(Member& m, const SignedMessage& msg);
  void RecordVote(Member& m, const SignedMessage& vote);
  std::optional<Hash256> Certificate(const Member& m,
                                     std::vector<SignedMessage>* proof) const;
  void MaybeComplete();
  std::size_t PackageBytes(std::size_t votes) const;
  bool IsHonest(NodeId node) const;

  sim::Simulator& sim_;
  committee::Committee committee_;
  std::uint64_t round_;
  ConsensusConfig config_;
  std::map<NodeId, Strategy> byzantine_;
  ProposalSource source_;
  DeterministicRng adversary_rng_;
  Signer signer_;
  sim::LatencyModel latency_;
  std::map<NodeId, std::unique_ptr<Member>> members_;
  std::vector<sim::EventHandle> handles_;
  std::uint64_t sends_ = 0;
  CompletionCallback on_complete_;
  RoundResult result_;
  bool completed_ = false;
};

// Runs one round to completion on a fresh simulator. Convenience for tests
// and analysis.
RoundResult RunSingleRound(const committee::Committee& committee,
                           std::uint64_t round, const ConsensusConfig& config,
                           const std::map<NodeId, Strategy>& byzantine,
                           ProposalSource source, std::uint64_t adversary_seed);

}  // namespace thinkey::consensus

#endif  // THINKEY_CONSENSUS_CONSENSUS_H_
