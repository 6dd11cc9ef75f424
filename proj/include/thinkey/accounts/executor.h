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

#ifndef THINKEY_ACCOUNTS_EXECUTOR_H_
#define THINKEY_ACCOUNTS_EXECUTOR_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "thinkey/accounts/account.h"
#include "thinkey/accounts/message.h"
#include "thinkey/chain/block.h"

namespace thinkey::accounts {

struct ExecutionConfig {
  // Inter-relay executions allowed per block; the rest carry over.
  std::uint64_t step_budget = 10000;
  // Collapse :add outer relays sharing a recipient before sealing.
  bool merge_outer_relays = false;
};

// Everything execute_block produces; the input to chain::SealBlock.
struct BlockContents {
  std::vector<Message> inputs;
  // One procedure per touched account, in address order.
  std::vector<ProcessingProcedure> procedures;
  // Inter relays emitted in this block, including those carried over.
  std::vector<Message> inter_relay;
  // Outer relays as recorded in the block (merged when configured).
  std::vector<Message> outer_relay;
  // Subset of inter_relay left unexecuted by the step budget.
  std::vector<Message> carried;
  chain::AccountMap post_accounts;
  Hash256 declared_state_root;
  std::uint64_t steps_executed = 0;
};

// Delivers each input to its recipient in order, then runs inter relays
// FIFO to quiescence or until the step budget is exhausted. Accounts first
// touched by an inter relay are created empty.
absl::StatusOr<BlockContents> ExecuteBlock(const chain::ChainState& chain,
                                           std::span<const Message> inputs,
                                           const ExecutionConfig& config = {});

// Per-account replay of a procedure against its pre-state.
struct ReplayOutcome {
  bool ok = false;
  Account post;
  std::vector<Message> emitted;
  std::string error;
};

using MessageTable = std::unordered_map<Hash256, const Message*>;

// Replays every procedure independently. The parallel policy replays
// accounts concurrently and returns the same outcomes in the same order.
std::vector<ReplayOutcome> ReplayProcedures(
    std::span<const ProcessingProcedure> procedures,
    const chain::AccountMap& pre_accounts, const MessageTable& messages,
    ExecutionPolicy policy = ExecutionPolicy::kSerial);

// Which of the block checks failed. kRoots is reported when procedures and
// order are valid but the recomputed state or relay roots differ.
enum class BlockCheck { kNone, kInputs, kProcedures, kOrder, kRoots };

struct BlockVerdict {
  BlockCheck failed = BlockCheck::kNone;
  std::string detail;

  bool ok() const { return failed == BlockCheck::kNone; }
};

// Verifies a cross-chain relay input (Merkle proof against a root-chain
// digest). Supplied by the cross-chain layer.
using RelayVerifier = std::function<bool(const Message&)>;

BlockVerdict ValidateBlock(const chain::Block& block,
                           const chain::ChainState& pre_state,
                           const RelayVerifier& verify_relay,
                           ExecutionPolicy policy = ExecutionPolicy::kSerial);

// Seals contents into the next block of `chain`. The procedures are replayed
// against the chain's accounts; a state root differing from the declared one,
// or emissions differing from the relay lists, rejects the contents.
absl::StatusOr<chain::Block> SealBlock(const chain::ChainState& chain,
                                       const BlockContents& contents);

// Appends a sealed block and installs its post state, carry-over queue and
// executed-relay ids.
absl::Status CommitBlock(chain::ChainState& chain, const chain::Block& block,
                         const BlockContents& contents);

// Collapses :add messages sharing a recipient into one :add carrying the
// sum. Recipients with a single :add and all other kinds pass through.
std::vector<Message> MergeMessages(std::span<const Message> msgs);

}  // namespace thinkey::accounts

#endif  // THINKEY_ACCOUNTS_EXECUTOR_H_
