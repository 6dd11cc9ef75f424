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

#ifndef THINKEY_CROSSCHAIN_CROSSCHAIN_H_
#define THINKEY_CROSSCHAIN_CROSSCHAIN_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "absl/status/status.h"
#include "thinkey/accounts/message.h"
#include "thinkey/chain/block.h"
#include "thinkey/committee/committee.h"
#include "thinkey/consensus/consensus.h"
#include "thinkey/common/types.h"

namespace thinkey::crosschain {

enum class MessageClass : std::uint8_t { kInput, kInterRelay, kOuterRelay };

const char* MessageClassName(MessageClass c);

// Status of a message relative to the chain `home`. Relays that arrived from
// another chain (they carry a relay proof) are inputs there; relays emitted
// on `home` are inter or outer relays by recipient.
MessageClass Classify(const accounts::Message& m, ChainId home,
                      std::uint32_t chain_count);

// Quorum attestation of a block hash by a committee. The aggregate is a hash
// over the members' individual confirmation tags in signer order.
chain::CommitteeProof Attest(const consensus::Signer& signer,
                             const committee::Committee& committee,
                             std::span<const NodeId> signers,
                             const Hash256& block_hash);

// Attestation check against the committee the root chain has registered.
absl::Status VerifyAttestation(const consensus::Signer& signer,
                               const committee::Committee& registered,
                               const chain::CommitteeProof& proof,
                               const Hash256& block_hash);

struct DigestMessage {
  ChainId chain_id = 0;
  chain::Digest digest;
  chain::CommitteeProof attestation;
};

DigestMessage MakeDigestMessage(const chain::Block& block);

struct DigestConflict {
  chain::Digest accepted;
  chain::Digest rejected;
};

// The part of root-chain state that transaction chains depend on: their
// registered committees and the digests of their finally-confirmed blocks.
// Submitted digests wait in a pending set and are recorded by the next root
// block.
class RootLedger {
 public:
  explicit RootLedger(consensus::Signer signer) : signer_(signer) {}

  // Installs the committee whose attestations are accepted for its chain,
  // replacing the previous epoch's committee.
  void RegisterCommittee(const committee::Committee& committee);
  const committee::Committee* CommitteeOf(ChainId chain) const;

  // Errors: kNotFound for a chain without a committee, kPermissionDenied for
  // a stale epoch, kUnauthenticated for a bad or sub-quorum attestation,
  // kAlreadyExists for a conflicting digest at an occupied height (logged as
  // a conflict; the first digest stands). Resubmitting an identical digest
  // is accepted and has no effect.
  absl::Status SubmitDigest(const DigestMessage& m);

  struct RootBlock {
    std::uint64_t height = 0;
    SimTime at = 0;
    std::vector<chain::Digest> recorded;
  };
  // Records every pending digest and advances the root height.
  RootBlock SealRootBlock(SimTime now);

  const chain::Digest* Find(ChainId chain, std::uint64_t height) const;
  std::optional<SimTime> ConfirmedAt(ChainId chain, std::uint64_t height) const;
  std::uint64_t height() const { return height_; }
  std::size_t pending() const { return pending_.size(); }
  const std::vector<DigestConflict>& conflicts() const { return conflicts_; }
  const std::map<ChainId, std::map<std::uint64_t, chain::Digest>>& digests()
      const {
    return digests_;
  }

 private:
  consensus::Signer signer_;
  std::map<ChainId, committee::Committee> committees_;
  std::map<ChainId, std::map<std::uint64_t, chain::Digest>> digests_;
  std::map<std::pair<ChainId, std::uint64_t>, SimTime> confirmed_at_;
  std::map<std::pair<ChainId, std::uint64_t>, chain::Digest> pending_;
  std::vector<DigestConflict> conflicts_;
  std::uint64_t height_ = 0;
};

// Attaches the inclusion proof of outer_relay[index] in `block`.
accounts::Message Envelope(const chain::Block& block, std::size_t index);

// True iff the origin digest is recorded on the root chain and the proof
// places the message content in that digest's outer-relay tree. Committee
// signatures are never accepted in place of the proof.
bool VerifyRelay(const accounts::Message& envelope, const RootLedger& root);

struct RelayTraceRecord {
  Hash256 msg_id;
  ChainId origin_chain = 0;
  ChainId dest_chain = 0;
  SimTime emitted_t = 0;
  std::optional<SimTime> root_confirm_t;
  std::optional<SimTime> executed_t;
};

void WriteRelayTraceJsonl(std::ostream& out,
                          const std::vector<RelayTraceRecord>& records);

// Routes outer relays from decided blocks to recipient chains. Envelopes
// are held until the origin digest is on the root chain, then queue as
// pending inputs of the recipient chain. Recipients drop relays they have
// already executed, so redelivery is harmless.
class RelayRouter {
 public:
  explicit RelayRouter(std::uint32_t chain_count) : chain_count_(chain_count) {}

  // Holds the outer relays of a block decided on its chain.
  void OnBlockDecided(const chain::Block& block, SimTime now);

  // Releases every held envelope whose origin digest is now recorded and
  // returns how many were released.
  std::size_t Release(const RootLedger& root, SimTime now);

  // Up to `max` verified envelopes for `state`'s chain, skipping relays it
  // has already executed and duplicates within the batch.
  std::vector<accounts::Message> TakePending(const chain::ChainState& state,
                                             const RootLedger& root,
                                             std::size_t max);
  // Returns envelopes that were taken but not included in a block.
  void Requeue(ChainId chain, std::vector<accounts::Message> msgs);
  // Queues a copy of an envelope that was already delivered.
  void Redeliver(const accounts::Message& envelope);

  // Records the relays among `block`'s inputs as executed.
  void OnBlockCommitted(const chain::Block& block, SimTime now);

  std::size_t held() const;
  std::size_t held_high_watermark() const { return held_high_watermark_; }
  std::size_t pending(ChainId chain) const;
  std::uint64_t duplicates_suppressed() const { return duplicates_suppressed_; }

  // Relay ids recorded in decided blocks mapped to how often they executed.
  const std::unordered_map<Hash256, std::uint32_t>& execution_counts() const {
    return executions_;
  }
  // Ids executed other than exactly once; nonempty means a violation, or
  // relays still in flight when called mid-run.
  std::vector<Hash256> NotExactlyOnce() const;
  std::vector<RelayTraceRecord> Trace() const;
  // Value carried by relays recorded in decided blocks but not yet executed.
  std::uint64_t InFlightValue() const;

 private:
  std::uint32_t chain_count_;
  // Keyed by origin (chain, height).
  std::map<std::pair<ChainId, std::uint64_t>, std::vector<accounts::Message>>
      held_;
  std::map<ChainId, std::deque<accounts::Message>> pending_;
  std::unordered_map<Hash256, std::uint32_t> executions_;
  std::unordered_map<Hash256, std::uint64_t> values_;
  std::unordered_map<Hash256, RelayTraceRecord> trace_;
  std::vector<Hash256> trace_order_;
  std::size_t held_high_watermark_ = 0;
  std::uint64_t duplicates_suppressed_ = 0;
};

}  // namespace thinkey::crosschain

#endif  // THINKEY_CROSSCHAIN_CROSSCHAIN_H_
