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

#include "thinkey/chain/block.h"

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "thinkey/common/encoding.h"

namespace thinkey::chain {

using accounts::Message;

namespace {

void EncodeMessageFull(Encoder& e, const Message& m) {
  e.Bytes(accounts::EncodeContent(m));
  // Verification data is part of the block even though it is not part of
  // the message id.
  if (const auto* sig = std::get_if<accounts::Signature>(&m.verification)) {
    e.U64(1).HashField(sig->tag);
  } else if (const auto* ref =
                 std::get_if<accounts::RelayProofRef>(&m.verification)) {
    e.U64(2).U64(ref->origin_chain).U64(ref->origin_height).U64(ref->leaf_index);
    e.U64(ref->proof.leaf_index);
    e.ListHeader(ref->proof.siblings.size());
    for (const ProofStep& s : ref->proof.siblings) {
      e.HashField(s.sibling).U64(static_cast<std::uint64_t>(s.side));
    }
  } else {
    e.U64(0);
  }
}

}  // namespace

std::vector<std::uint8_t> EncodeBlock(const Block& b) {
  Encoder e;
  e.Str("block");
  e.U64(b.chain_id).U64(b.height).HashField(b.parent_digest);
  e.ListHeader(b.input_messages.size());
  for (const Message& m : b.input_messages) EncodeMessageFull(e, m);
  e.ListHeader(b.procedures.size());
  for (const auto& p : b.procedures) {
    e.U64(p.account.value);
    e.ListHeader(p.steps.size());
    for (const auto& s : p.steps) {
      e.HashField(s.received).U64(s.fault ? 1 : 0);
      e.ListHeader(s.emitted.size());
      for (const Hash256& id : s.emitted) e.HashField(id);
    }
  }
  e.ListHeader(b.inter_relay.size());
  for (const Message& m : b.inter_relay) EncodeMessageFull(e, m);
  e.ListHeader(b.outer_relay.size());
  for (const Message& m : b.outer_relay) EncodeMessageFull(e, m);
  e.HashField(b.outer_relay_root).HashField(b.state_root);
  return e.Take();
}

Hash256 BlockHash(const Block& b) { return Sha256(EncodeBlock(b)); }

Digest DigestOf(const Block& b) {
  return Digest{b.chain_id, b.height, BlockHash(b), b.outer_relay_root,
                b.state_root};
}

std::vector<Leaf> RelayLeaves(const std::vector<Message>& msgs) {
  std::vector<Leaf> leaves;
  leaves.reserve(msgs.size());
  for (const Message& m : msgs) leaves.push_back(accounts::EncodeContent(m));
  return leaves;
}

Hash256 RelayRoot(const std::vector<Message>& msgs, ExecutionPolicy policy) {
  return BuildMerkle(RelayLeaves(msgs), policy);
}

Hash256 StateRoot(const AccountMap& accounts, ExecutionPolicy policy) {
  std::vector<Leaf> leaves;
  leaves.reserve(accounts.size());
  for (const auto& [addr, acct] : accounts) {
    leaves.push_back(accounts::EncodeAccount(acct));
  }
  return BuildMerkle(leaves, policy);
}

bool ChainState::HasExecutedRelay(ChainId origin, const Hash256& id) const {
  auto it = executed_relays.find(origin);
  return it != executed_relays.end() && it->second.contains(id);
}

namespace {

nlohmann::json DigestObject(const Digest& d) {
  return nlohmann::json{{"chain_id", d.chain_id},
                        {"height", d.height},
                        {"block_hash", d.block_hash.ToHex()},
                        {"outer_relay_root", d.outer_relay_root.ToHex()},
                        {"state_root", d.state_root.ToHex()}};
}

nlohmann::json MessageIds(const std::vector<Message>& msgs) {
  nlohmann::json out = nlohmann::json::array();
  for (const Message& m : msgs) out.push_back(m.id.ToHex());
  return out;
}

}  // namespace

std::string DigestJson(const Digest& d) { return DigestObject(d).dump(); }

std::string BlockJson(const Block& b) {
  nlohmann::json procs = nlohmann::json::array();
  for (const auto& p : b.procedures) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : p.steps) {
      nlohmann::json emitted = nlohmann::json::array();
      for (const Hash256& id : s.emitted) emitted.push_back(id.ToHex());
      steps.push_back({{"received", s.received.ToHex()},
                       {"emitted", emitted},
                       {"fault", s.fault}});
    }
    procs.push_back({{"account", p.account.value}, {"steps", steps}});
  }
  nlohmann::json signers = nlohmann::json::array();
  for (NodeId n : b.committee_proof.signers) signers.push_back(n);
  nlohmann::json j{
      {"chain_id", b.chain_id},
      {"height", b.height},
      {"parent_digest", b.parent_digest.ToHex()},
      {"input_messages", MessageIds(b.input_messages)},
      {"procedures", procs},
      {"inter_relay", MessageIds(b.inter_relay)},
      {"outer_relay", MessageIds(b.outer_relay)},
      {"outer_relay_root", b.outer_relay_root.ToHex()},
      {"state_root", b.state_root.ToHex()},
      {"committee_proof",
       {{"epoch", b.committee_proof.epoch},
        {"signers", signers},
        {"aggregate", b.committee_proof.aggregate.ToHex()}}},
      {"digest", DigestObject(DigestOf(b))}};
  return j.dump();
}

Block GenesisBlock(ChainId chain_id, const AccountMap& accounts) {
  Block b;
  b.chain_id = chain_id;
  b.height = 0;
  b.outer_relay_root = EmptyRoot();
  b.state_root = StateRoot(accounts);
  return b;
}

ChainState GenesisState(ChainId chain_id, std::uint32_t chain_count,
                        AccountMap accounts) {
  ChainState s;
  s.chain_id = chain_id;
  s.chain_count = chain_count;
  s.tip = DigestOf(GenesisBlock(chain_id, accounts));
  s.accounts = std::move(accounts);
  return s;
}

absl::Status CheckBlockShape(const Block& b, std::uint32_t chain_count) {
  if (b.chain_id != kRootChain) {
    for (const Message& m : b.inter_relay) {
      if (accounts::ChainOf(m.to, chain_count) != b.chain_id) {
        return absl::FailedPreconditionError(
            absl::StrCat("inter relay ", m.id.ToHex(), " leaves chain ",
                         b.chain_id));
      }
    }
    for (const Message& m : b.outer_relay) {
      if (accounts::ChainOf(m.to, chain_count) == b.chain_id) {
        return absl::FailedPreconditionError(
            absl::StrCat("outer relay ", m.id.ToHex(), " stays on chain ",
                         b.chain_id));
      }
    }
  }
  if (RelayRoot(b.outer_relay) != b.outer_relay_root) {
    return absl::DataLossError("outer relay root does not match relay list");
  }
  return absl::OkStatus();
}

absl::Status AppendBlock(ChainState& state, const Block& block) {
  if (block.chain_id != state.chain_id) {
    return absl::InvalidArgumentError(absl::StrCat(
        "block for chain ", block.chain_id, " appended to ", state.chain_id));
  }
  if (block.height != state.next_height()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "expected height ", state.next_height(), ", got ", block.height));
  }
  if (block.parent_digest != state.tip_hash()) {
    return absl::FailedPreconditionError("parent digest does not match tip");
  }
  if (absl::Status s = CheckBlockShape(block, state.chain_count); !s.ok()) {
    return s;
  }
  state.tip = DigestOf(block);
  return absl::OkStatus();
}

}  // namespace thinkey::chain
