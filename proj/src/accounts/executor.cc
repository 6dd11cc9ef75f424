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

#include "thinkey/accounts/executor.h"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "thinkey/accounts/order_graph.h"

namespace thinkey::accounts {

using chain::AccountMap;
using chain::ChainState;

namespace {

bool SameIds(std::vector<Hash256> a, std::vector<Hash256> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::vector<Hash256> IdsOf(std::span<const Message> msgs) {
  std::vector<Hash256> ids;
  ids.reserve(msgs.size());
  for (const Message& m : msgs) ids.push_back(m.id);
  return ids;
}

}  // namespace

absl::StatusOr<BlockContents> ExecuteBlock(const ChainState& chain,
                                           std::span<const Message> inputs,
                                           const ExecutionConfig& config) {
  BlockContents out;
  out.inputs.assign(inputs.begin(), inputs.end());
  AccountMap accounts = chain.accounts;
  std::map<Address, ProcessingProcedure> procedures;
  std::vector<Message> outer_emitted;

  std::unordered_set<Hash256> seen;
  for (const Message& m : inputs) {
    if (!seen.insert(m.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate input ", m.id.ToHex()));
    }
    if (ChainOf(m.to, chain.chain_count) != chain.chain_id) {
      return absl::InvalidArgumentError(absl::StrCat(
          "input ", m.id.ToHex(), " addressed to another chain"));
    }
  }

  auto deliver = [&](const Message& m, std::deque<Message>& queue) {
    auto [it, inserted] = accounts.try_emplace(m.to, NewAccount(m.to));
    ApplyResult r = ApplyMessage(it->second, m);
    it->second = std::move(r.account);
    ProcessingProcedure& proc = procedures[m.to];
    proc.account = m.to;
    ProcedureStep step{m.id, {}, r.fault};
    for (Message& e : r.emitted) {
      step.emitted.push_back(e.id);
      if (ChainOf(e.to, chain.chain_count) == chain.chain_id) {
        out.inter_relay.push_back(e);
        queue.push_back(std::move(e));
      } else {
        outer_emitted.push_back(std::move(e));
      }
    }
    proc.steps.push_back(std::move(step));
  };

  std::deque<Message> queue;
  for (const Message& m : inputs) {
    deliver(m, queue);
    ++out.steps_executed;
  }
  std::uint64_t relay_steps = 0;
  while (!queue.empty() && relay_steps < config.step_budget) {
    Message m = std::move(queue.front());
    queue.pop_front();
    deliver(m, queue);
    ++relay_steps;
    ++out.steps_executed;
  }
  out.carried.assign(queue.begin(), queue.end());

  out.outer_relay = config.merge_outer_relays ? MergeMessages(outer_emitted)
                                              : std::move(outer_emitted);
  for (auto& [addr, proc] : procedures) out.procedures.push_back(std::move(proc));
  out.declared_state_root = chain::StateRoot(accounts);
  out.post_accounts = std::move(accounts);
  return out;
}

std::vector<ReplayOutcome> ReplayProcedures(
    std::span<const ProcessingProcedure> procedures,
    const AccountMap& pre_accounts, const MessageTable& messages,
    ExecutionPolicy policy) {
  std::vector<ReplayOutcome> out(procedures.size());
  auto replay = [&](std::size_t i) {
    const ProcessingProcedure& proc = procedures[i];
    ReplayOutcome& r = out[i];
    auto pre = pre_accounts.find(proc.account);
    r.post = pre != pre_accounts.end() ? pre->second : NewAccount(proc.account);
    for (const ProcedureStep& step : proc.steps) {
      auto it = messages.find(step.received);
      if (it == messages.end()) {
        r.error = absl::StrCat("message ", step.received.ToHex(),
                               " not present in block");
        return;
      }
      const Message& m = *it->second;
      if (m.to != proc.account) {
        r.error = absl::StrCat("message ", m.id.ToHex(),
                               " delivered to the wrong account");
        return;
      }
      if (m.is_external() && *m.nonce != r.post.nonce) {
        r.error = absl::StrCat("nonce ", *m.nonce, " out of sequence, expected ",
                               r.post.nonce);
        return;
      }
      ApplyResult a = ApplyMessage(r.post, m);
      if (a.fault != step.fault || a.emitted.size() != step.emitted.size()) {
        r.error = absl::StrCat("step for ", m.id.ToHex(),
                               " does not replay: emission mismatch");
        return;
      }
      for (std::size_t k = 0; k < a.emitted.size(); ++k) {
        if (a.emitted[k].id != step.emitted[k]) {
          r.error = absl::StrCat("step for ", m.id.ToHex(),
                                 " emitted a different message");
          return;
        }
      }
      r.post = std::move(a.account);
      for (Message& e : a.emitted) r.emitted.push_back(std::move(e));
    }
    r.ok = true;
  };

  const std::int64_t n = static_cast<std::int64_t>(procedures.size());
  if (policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) replay(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < n; ++i) replay(static_cast<std::size_t>(i));
  }
  return out;
}

namespace {

// Shared by ValidateBlock and SealBlock: replays the procedures and checks
// that the emissions match the block's relay lists. On success fills
// `post` with the full post-state.
BlockVerdict ReplayAndMatch(const ChainState& pre_state,
                            std::span<const Message> inputs,
                            std::span<const ProcessingProcedure> procedures,
                            std::span<const Message> inter_relay,
                            std::span<const Message> outer_relay,
                            ExecutionPolicy policy, AccountMap& post) {
  MessageTable table;
  for (const Message& m : inputs) table.emplace(m.id, &m);
  for (const Message& m : inter_relay) table.emplace(m.id, &m);

  for (std::size_t i = 1; i < procedures.size(); ++i) {
    if (!(procedures[i - 1].account < procedures[i].account)) {
      return {BlockCheck::kProcedures,
              "procedures not in strictly increasing address order"};
    }
  }

  std::vector<ReplayOutcome> outcomes =
      ReplayProcedures(procedures, pre_state.accounts, table, policy);
  std::vector<Message> inter_emitted;
  std::vector<Message> outer_emitted;
  post = pre_state.accounts;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ReplayOutcome& r = outcomes[i];
    if (!r.ok) {
      return {BlockCheck::kProcedures,
              absl::StrCat("procedure of account ", procedures[i].account.value,
                           ": ", r.error)};
    }
    post[procedures[i].account] = std::move(r.post);
    for (Message& e : r.emitted) {
      if (ChainOf(e.to, pre_state.chain_count) == pre_state.chain_id) {
        inter_emitted.push_back(std::move(e));
      } else {
        outer_emitted.push_back(std::move(e));
      }
    }
  }
  if (!SameIds(IdsOf(inter_emitted), IdsOf(inter_relay))) {
    return {BlockCheck::kProcedures,
            "inter relay list differs from replayed emissions"};
  }
  // Relay lists carry content; ids are rechecked against it.
  for (const Message& m : inter_relay) {
    if (ComputeId(m) != m.id) {
      return {BlockCheck::kProcedures, "inter relay content does not match id"};
    }
  }
  std::vector<Hash256> outer_ids = IdsOf(outer_emitted);
  std::vector<Hash256> listed = IdsOf(outer_relay);
  if (!SameIds(outer_ids, listed) &&
      !SameIds(IdsOf(MergeMessages(outer_emitted)), listed)) {
    return {BlockCheck::kProcedures,
            "outer relay list differs from replayed emissions"};
  }
  for (const Message& m : outer_relay) {
    if (ComputeId(m) != m.id) {
      return {BlockCheck::kProcedures, "outer relay content does not match id"};
    }
  }
  return {};
}

}  // namespace

BlockVerdict ValidateBlock(const chain::Block& block,
                           const ChainState& pre_state,
                           const RelayVerifier& verify_relay,
                           ExecutionPolicy policy) {
  // Check 1: each input message.
  std::unordered_set<Hash256> input_ids;
  std::map<Address, std::uint64_t> next_nonce;
  for (const Message& m : block.input_messages) {
    if (!input_ids.insert(m.id).second) {
      return {BlockCheck::kInputs, absl::StrCat("duplicate input ", m.id.ToHex())};
    }
    if (ComputeId(m) != m.id) {
      return {BlockCheck::kInputs,
              absl::StrCat("input ", m.id.ToHex(), " content does not match id")};
    }
    if (ChainOf(m.to, pre_state.chain_count) != pre_state.chain_id) {
      return {BlockCheck::kInputs,
              absl::StrCat("input ", m.id.ToHex(), " addressed off-chain")};
    }
    if (m.is_external()) {
      if (m.from != m.to) {
        return {BlockCheck::kInputs, "external message not self-addressed"};
      }
      if (!VerifySignature(m)) {
        return {BlockCheck::kInputs,
                absl::StrCat("bad signature on ", m.id.ToHex())};
      }
      auto acct = pre_state.accounts.find(m.from);
      if (acct == pre_state.accounts.end()) {
        return {BlockCheck::kInputs, "external message from unknown account"};
      }
      auto [it, fresh] = next_nonce.try_emplace(m.from, acct->second.nonce);
      if (*m.nonce != it->second) {
        return {BlockCheck::kInputs,
                absl::StrCat("nonce ", *m.nonce, " from ", m.from.value,
                             " expected ", it->second)};
      }
      ++it->second;
    } else if (const auto* ref = std::get_if<RelayProofRef>(&m.verification)) {
      if (pre_state.HasExecutedRelay(ref->origin_chain, m.id)) {
        return {BlockCheck::kInputs,
                absl::StrCat("relay ", m.id.ToHex(), " already executed")};
      }
      if (!verify_relay || !verify_relay(m)) {
        return {BlockCheck::kInputs,
                absl::StrCat("relay ", m.id.ToHex(), " failed verification")};
      }
    } else if (!pre_state.carried.contains(m.id)) {
      return {BlockCheck::kInputs,
              absl::StrCat("relay ", m.id.ToHex(),
                           " has no proof and was not carried over")};
    }
  }

  // Check 2: each procedure replays on its own.
  AccountMap post;
  BlockVerdict replay =
      ReplayAndMatch(pre_state, block.input_messages, block.procedures,
                     block.inter_relay, block.outer_relay, policy, post);
  if (!replay.ok()) return replay;

  // Check 3: a consistent global order exists and every input is consumed.
  OrderVerdict order = ValidateOrder(block.procedures, input_ids);
  if (!order.ok()) return {BlockCheck::kOrder, order.detail};
  std::unordered_set<Hash256> received;
  for (const auto& p : block.procedures) {
    for (const auto& s : p.steps) received.insert(s.received);
  }
  for (const Hash256& id : input_ids) {
    if (!received.contains(id)) {
      return {BlockCheck::kOrder,
              absl::StrCat("input ", id.ToHex(), " never processed")};
    }
  }

  if (block.chain_id != pre_state.chain_id ||
      block.height != pre_state.next_height() ||
      block.parent_digest != pre_state.tip_hash()) {
    return {BlockCheck::kRoots, "block does not extend the committed tip"};
  }
  if (absl::Status s = chain::CheckBlockShape(block, pre_state.chain_count);
      !s.ok()) {
    return {BlockCheck::kRoots, std::string(s.message())};
  }
  if (chain::StateRoot(post, policy) != block.state_root) {
    return {BlockCheck::kRoots, "state root mismatch"};
  }
  return {};
}

absl::StatusOr<chain::Block> SealBlock(const ChainState& chain,
                                       const BlockContents& contents) {
  AccountMap post;
  BlockVerdict v = ReplayAndMatch(chain, contents.inputs, contents.procedures,
                                  contents.inter_relay, contents.outer_relay,
                                  ExecutionPolicy::kSerial, post);
  if (!v.ok()) return absl::DataLossError(v.detail);
  Hash256 root = chain::StateRoot(post);
  if (root != contents.declared_state_root) {
    return absl::DataLossError(
        "declared state root differs from replayed state root");
  }
  chain::Block b;
  b.chain_id = chain.chain_id;
  b.height = chain.next_height();
  b.parent_digest = chain.tip_hash();
  b.input_messages = contents.inputs;
  b.procedures = contents.procedures;
  b.inter_relay = contents.inter_relay;
  b.outer_relay = contents.outer_relay;
  b.outer_relay_root = chain::RelayRoot(b.outer_relay);
  b.state_root = root;
  return b;
}

absl::Status CommitBlock(ChainState& chain, const chain::Block& block,
                         const BlockContents& contents) {
  if (absl::Status s = chain::AppendBlock(chain, block); !s.ok()) return s;
  chain.accounts = contents.post_accounts;
  for (const Message& m : contents.inputs) {
    if (const auto* ref = std::get_if<RelayProofRef>(&m.verification)) {
      chain.executed_relays[ref->origin_chain].insert(m.id);
    } else if (m.is_relay()) {
      chain.carried.erase(m.id);
    }
  }
  for (const Message& m : contents.carried) chain.carried.emplace(m.id, m);
  return absl::OkStatus();
}

std::vector<Message> MergeMessages(std::span<const Message> msgs) {
  std::map<Address, std::vector<const Message*>> adds;
  for (const Message& m : msgs) {
    if (m.input.kind == kAdd && m.input.args.size() == 1) {
      adds[m.to].push_back(&m);
    }
  }
  std::vector<Message> out;
  std::unordered_set<std::uint64_t> emitted_groups;
  for (const Message& m : msgs) {
    bool is_add = m.input.kind == kAdd && m.input.args.size() == 1;
    if (!is_add || adds[m.to].size() < 2) {
      out.push_back(m);
      continue;
    }
    if (!emitted_groups.insert(m.to.value).second) continue;
    const auto& group = adds[m.to];
    std::vector<Hash256> ids;
    std::uint64_t total = 0;
    bool same_sender = true;
    for (const Message* g : group) {
      ids.push_back(g->id);
      total += g->input.args[0];
      same_sender = same_sender && g->from == group.front()->from;
    }
    std::sort(ids.begin(), ids.end());
    Sha256Hasher h;
    h.Update("merged");
    for (const Hash256& id : ids) h.Update(id);
    // Senders may differ; the merged message is attributed to the common
    // sender or to the zero address.
    Address from = same_sender ? group.front()->from : Address{0};
    out.push_back(MakeRelay(from, m.to, Add(total), h.Finish(), 0));
  }
  return out;
}

}  // namespace thinkey::accounts
