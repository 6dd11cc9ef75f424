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

#include "thinkey/crosschain/crosschain.h"

#include <algorithm>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "thinkey/chain/merkle.h"

namespace thinkey::crosschain {

using accounts::Message;
using accounts::RelayProofRef;

const char* MessageClassName(MessageClass c) {
  switch (c) {
    case MessageClass::kInput:
      return "input";
    case MessageClass::kInterRelay:
      return "inter_relay";
    case MessageClass::kOuterRelay:
      return "outer_relay";
  }
  return "unknown";
}

MessageClass Classify(const Message& m, ChainId home,
                      std::uint32_t chain_count) {
  if (m.is_external()) return MessageClass::kInput;
  if (accounts::ChainOf(m.to, chain_count) != home) {
    return MessageClass::kOuterRelay;
  }
  if (const auto* ref = std::get_if<RelayProofRef>(&m.verification)) {
    if (ref->origin_chain != home) return MessageClass::kInput;
  }
  return MessageClass::kInterRelay;
}

namespace {

Hash256 Aggregate(const consensus::Signer& signer, std::uint64_t epoch,
                  std::span<const NodeId> signers, const Hash256& block_hash) {
  Sha256Hasher h;
  h.Update("thinkey-attest").Update(block_hash).UpdateU64(epoch);
  for (NodeId s : signers) {
    h.Update(signer.Sign(s, epoch, consensus::Stage::kConfirmation, block_hash)
                 .tag);
  }
  return h.Finish();
}

}  // namespace

chain::CommitteeProof Attest(const consensus::Signer& signer,
                             const committee::Committee& committee,
                             std::span<const NodeId> signers,
                             const Hash256& block_hash) {
  chain::CommitteeProof p;
  p.epoch = committee.epoch;
  p.signers.assign(signers.begin(), signers.end());
  std::sort(p.signers.begin(), p.signers.end());
  p.aggregate = Aggregate(signer, p.epoch, p.signers, block_hash);
  return p;
}

absl::Status VerifyAttestation(const consensus::Signer& signer,
                               const committee::Committee& registered,
                               const chain::CommitteeProof& proof,
                               const Hash256& block_hash) {
  if (proof.epoch != registered.epoch) {
    return absl::PermissionDeniedError(
        absl::StrCat("attestation from epoch ", proof.epoch,
                     ", registered committee is epoch ", registered.epoch));
  }
  std::set<NodeId> distinct(proof.signers.begin(), proof.signers.end());
  if (distinct.size() != proof.signers.size()) {
    return absl::UnauthenticatedError("repeated signer in attestation");
  }
  for (NodeId s : proof.signers) {
    if (!registered.contains(s)) {
      return absl::UnauthenticatedError(
          absl::StrCat("signer ", s, " is not a committee member"));
    }
  }
  if (proof.signers.size() < registered.quorum) {
    return absl::UnauthenticatedError(
        absl::StrCat("attestation has ", proof.signers.size(),
                     " signers, quorum is ", registered.quorum));
  }
  if (Aggregate(signer, proof.epoch, proof.signers, block_hash) !=
      proof.aggregate) {
    return absl::UnauthenticatedError("aggregate signature does not verify");
  }
  return absl::OkStatus();
}

DigestMessage MakeDigestMessage(const chain::Block& block) {
  return DigestMessage{block.chain_id, chain::DigestOf(block),
                       block.committee_proof};
}

void RootLedger::RegisterCommittee(const committee::Committee& committee) {
  committees_[committee.chain_id] = committee;
}

const committee::Committee* RootLedger::CommitteeOf(ChainId chain) const {
  auto it = committees_.find(chain);
  return it == committees_.end() ? nullptr : &it->second;
}

absl::Status RootLedger::SubmitDigest(const DigestMessage& m) {
  const committee::Committee* c = CommitteeOf(m.chain_id);
  if (c == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("no committee registered for chain ", m.chain_id));
  }
  if (m.digest.chain_id != m.chain_id) {
    return absl::InvalidArgumentError("digest names a different chain");
  }
  if (absl::Status s =
          VerifyAttestation(signer_, *c, m.attestation, m.digest.block_hash);
      !s.ok()) {
    return s;
  }
  const auto key = std::pair(m.chain_id, m.digest.height);
  const chain::Digest* existing = Find(m.chain_id, m.digest.height);
  if (existing == nullptr) {
    auto it = pending_.find(key);
    if (it != pending_.end()) existing = &it->second;
  }
  if (existing != nullptr) {
    if (*existing == m.digest) return absl::OkStatus();
    conflicts_.push_back(DigestConflict{*existing, m.digest});
    return absl::AlreadyExistsError(
        absl::StrCat("conflicting digest for chain ", m.chain_id, " height ",
                     m.digest.height));
  }
  pending_.emplace(key, m.digest);
  return absl::OkStatus();
}

RootLedger::RootBlock RootLedger::SealRootBlock(SimTime now) {
  RootBlock b;
  b.height = ++height_;
  b.at = now;
  for (auto& [key, digest] : pending_) {
    digests_[key.first].emplace(key.second, digest);
    confirmed_at_.emplace(key, now);
    b.recorded.push_back(digest);
  }
  pending_.clear();
  return b;
}

const chain::Digest* RootLedger::Find(ChainId chain,
                                      std::uint64_t height) const {
  auto c = digests_.find(chain);
  if (c == digests_.end()) return nullptr;
  auto h = c->second.find(height);
  return h == c->second.end() ? nullptr : &h->second;
}

std::optional<SimTime> RootLedger::ConfirmedAt(ChainId chain,
                                               std::uint64_t height) const {
  auto it = confirmed_at_.find({chain, height});
  if (it == confirmed_at_.end()) return std::nullopt;
  return it->second;
}

Message Envelope(const chain::Block& block, std::size_t index) {
  Message m = block.outer_relay.at(index);
  auto proof = chain::Prove(chain::RelayLeaves(block.outer_relay), index);
  m.verification =
      RelayProofRef{block.chain_id, block.height, index, std::move(*proof)};
  return m;
}

bool VerifyRelay(const Message& envelope, const RootLedger& root) {
  const auto* ref = std::get_if<RelayProofRef>(&envelope.verification);
  if (ref == nullptr || envelope.is_external()) return false;
  if (accounts::ComputeId(envelope) != envelope.id) return false;
  const chain::Digest* d = root.Find(ref->origin_chain, ref->origin_height);
  if (d == nullptr) return false;
  return chain::Verify(d->outer_relay_root, accounts::EncodeContent(envelope),
                       ref->leaf_index, ref->proof);
}

void WriteRelayTraceJsonl(std::ostream& out,
                          const std::vector<RelayTraceRecord>& records) {
  for (const RelayTraceRecord& r : records) {
    nlohmann::ordered_json j;
    j["msg_id"] = r.msg_id.ToHex();
    j["origin_chain"] = r.origin_chain;
    j["dest_chain"] = r.dest_chain;
    j["emitted_t"] = r.emitted_t;
    j["root_confirm_t"] =
        r.root_confirm_t ? nlohmann::ordered_json(*r.root_confirm_t) : nullptr;
    j["executed_t"] =
        r.executed_t ? nlohmann::ordered_json(*r.executed_t) : nullptr;
    out << j.dump() << '\n';
  }
}

void RelayRouter::OnBlockDecided(const chain::Block& block, SimTime now) {
  if (block.outer_relay.empty()) return;
  std::vector<Message>& bucket = held_[{block.chain_id, block.height}];
  for (std::size_t i = 0; i < block.outer_relay.size(); ++i) {
    Message env = Envelope(block, i);
    if (executions_.try_emplace(env.id, 0).second) {
      trace_order_.push_back(env.id);
      values_.emplace(env.id, accounts::CarriedValue(env));
      trace_.emplace(env.id,
                     RelayTraceRecord{env.id, block.chain_id,
                                      accounts::ChainOf(env.to, chain_count_),
                                      now, std::nullopt, std::nullopt});
    }
    bucket.push_back(std::move(env));
  }
  held_high_watermark_ = std::max(held_high_watermark_, held());
}

std::size_t RelayRouter::Release(const RootLedger& root, SimTime now) {
  std::size_t released = 0;
  for (auto it = held_.begin(); it != held_.end();) {
    const auto [chain, height] = it->first;
    if (root.Find(chain, height) == nullptr) {
      ++it;
      continue;
    }
    SimTime confirmed = root.ConfirmedAt(chain, height).value_or(now);
    for (Message& env : it->second) {
      RelayTraceRecord& rec = trace_.at(env.id);
      if (!rec.root_confirm_t) rec.root_confirm_t = confirmed;
      pending_[rec.dest_chain].push_back(std::move(env));
      ++released;
    }
    it = held_.erase(it);
  }
  return released;
}

std::vector<Message> RelayRouter::TakePending(const chain::ChainState& state,
                                              const RootLedger& root,
                                              std::size_t max) {
  std::vector<Message> out;
  auto it = pending_.find(state.chain_id);
  if (it == pending_.end()) return out;
  std::deque<Message>& queue = it->second;
  std::unordered_set<Hash256> batch;
  while (!queue.empty() && out.size() < max) {
    Message m = std::move(queue.front());
    queue.pop_front();
    const auto& ref = std::get<RelayProofRef>(m.verification);
    if (state.HasExecutedRelay(ref.origin_chain, m.id) ||
        !batch.insert(m.id).second) {
      ++duplicates_suppressed_;
      continue;
    }
    if (!VerifyRelay(m, root)) continue;
    out.push_back(std::move(m));
  }
  return out;
}

void RelayRouter::Requeue(ChainId chain, std::vector<Message> msgs) {
  std::deque<Message>& queue = pending_[chain];
  for (auto it = msgs.rbegin(); it != msgs.rend(); ++it) {
    queue.push_front(std::move(*it));
  }
}

void RelayRouter::Redeliver(const Message& envelope) {
  pending_[accounts::ChainOf(envelope.to, chain_count_)].push_back(envelope);
}

void RelayRouter::OnBlockCommitted(const chain::Block& block, SimTime now) {
  for (const Message& m : block.input_messages) {
    if (!std::holds_alternative<RelayProofRef>(m.verification)) continue;
    ++executions_[m.id];
    auto rec = trace_.find(m.id);
    if (rec != trace_.end() && !rec->second.executed_t) {
      rec->second.executed_t = now;
    }
  }
}

std::size_t RelayRouter::held() const {
  std::size_t n = 0;
  for (const auto& [key, msgs] : held_) n += msgs.size();
  return n;
}

std::size_t RelayRouter::pending(ChainId chain) const {
  auto it = pending_.find(chain);
  return it == pending_.end() ? 0 : it->second.size();
}

std::vector<Hash256> RelayRouter::NotExactlyOnce() const {
  std::vector<Hash256> out;
  for (const auto& [id, count] : executions_) {
    if (count != 1) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t RelayRouter::InFlightValue() const {
  std::uint64_t total = 0;
  for (const auto& [id, count] : executions_) {
    if (count == 0) total += values_.at(id);
  }
  return total;
}

std::vector<RelayTraceRecord> RelayRouter::Trace() const {
  std::vector<RelayTraceRecord> out;
  out.reserve(trace_order_.size());
  for (const Hash256& id : trace_order_) out.push_back(trace_.at(id));
  return out;
}

}  // namespace thinkey::crosschain
