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

#ifndef THINKEY_CHAIN_BLOCK_H_
#define THINKEY_CHAIN_BLOCK_H_

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "thinkey/accounts/account.h"
#include "thinkey/accounts/message.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/types.h"

namespace thinkey::chain {

// Quorum attestation over a block hash: the committee epoch and the members
// whose tags were aggregated.
struct CommitteeProof {
  std::uint64_t epoch = 0;
  std::vector<NodeId> signers;
  Hash256 aggregate;

  bool operator==(const CommitteeProof&) const = default;
};

struct Block {
  ChainId chain_id = 0;
  std::uint64_t height = 0;
  // All-zero for the genesis block.
  Hash256 parent_digest;
  std::vector<accounts::Message> input_messages;
  std::vector<accounts::ProcessingProcedure> procedures;
  std::vector<accounts::Message> inter_relay;
  std::vector<accounts::Message> outer_relay;
  Hash256 outer_relay_root;
  Hash256 state_root;
  CommitteeProof committee_proof;
};

struct Digest {
  ChainId chain_id = 0;
  std::uint64_t height = 0;
  Hash256 block_hash;
  Hash256 outer_relay_root;
  Hash256 state_root;

  bool operator==(const Digest&) const = default;
};

// Canonical encoding of every block field except the committee proof, which
// attests this encoding's hash and so cannot be part of it.
std::vector<std::uint8_t> EncodeBlock(const Block& b);
Hash256 BlockHash(const Block& b);
Digest DigestOf(const Block& b);

// Merkle leaves and root over a list of relay messages (content encodings).
std::vector<Leaf> RelayLeaves(const std::vector<accounts::Message>& msgs);
Hash256 RelayRoot(const std::vector<accounts::Message>& msgs,
                  ExecutionPolicy policy = ExecutionPolicy::kSerial);

using AccountMap = std::map<Address, accounts::Account>;

// Merkle root over account encodings in address order.
Hash256 StateRoot(const AccountMap& accounts,
                  ExecutionPolicy policy = ExecutionPolicy::kSerial);

struct ChainState {
  ChainId chain_id = 0;
  std::uint32_t chain_count = 1;
  std::optional<Digest> tip;
  AccountMap accounts;
  // Root chain only: digests recorded per transaction chain, by height.
  std::map<ChainId, std::map<std::uint64_t, Digest>> confirmed_digests;
  // Inter-relay messages emitted but not executed because the step budget
  // ran out; they re-enter as inputs of a later block.
  std::map<Hash256, accounts::Message> carried;
  // Relay ids already executed here, per origin chain.
  std::unordered_map<ChainId, std::unordered_set<Hash256>> executed_relays;

  std::uint64_t next_height() const { return tip ? tip->height + 1 : 0; }
  Hash256 tip_hash() const { return tip ? tip->block_hash : Hash256{}; }
  bool HasExecutedRelay(ChainId origin, const Hash256& id) const;
};

// Height-0 block over the initial accounts, with a zero parent digest.
// Canonical JSON exports (sorted keys, hashes as lowercase hex, messages by
// id) used for golden-file comparisons.
std::string DigestJson(const Digest& d);
std::string BlockJson(const Block& b);

Block GenesisBlock(ChainId chain_id, const AccountMap& accounts);

// State whose tip is the genesis block.
ChainState GenesisState(ChainId chain_id, std::uint32_t chain_count,
                        AccountMap accounts);

// Checks linkage (height and parent digest) and the outer-relay root, then
// advances the tip. Account state is updated by the caller.
absl::Status AppendBlock(ChainState& state, const Block& block);

// Block invariants that need no execution: inter-relay recipients live on
// the block's chain, outer-relay recipients elsewhere, and the outer-relay
// root matches its list.
absl::Status CheckBlockShape(const Block& b, std::uint32_t chain_count);

}  // namespace thinkey::chain

#endif  // THINKEY_CHAIN_BLOCK_H_
