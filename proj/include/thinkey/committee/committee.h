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

#ifndef THINKEY_COMMITTEE_COMMITTEE_H_
#define THINKEY_COMMITTEE_COMMITTEE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/types.h"

namespace thinkey::committee {

struct StakeEntry {
  std::uint64_t stake = 0;
  Hash256 public_key;
  // Stake stays frozen until the node quits.
  bool frozen = true;
};

// Stake registry. Deposits are frozen on registration; punishments move
// stake into a burned total so that value stays accounted for.
class StakeRegistry {
 public:
  absl::Status Register(NodeId node, std::uint64_t stake, Hash256 public_key);
  // Unfreezes and removes the node's stake, returning the amount released.
  absl::StatusOr<std::uint64_t> Withdraw(NodeId node);
  // Deducts `fraction` of the node's stake (rounded down) and returns the
  // amount burned.
  std::uint64_t Punish(NodeId node, double fraction);

  const std::map<NodeId, StakeEntry>& entries() const { return entries_; }
  std::uint64_t stake_of(NodeId node) const;
  std::uint64_t total_frozen() const;
  std::uint64_t total_burned() const { return burned_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<NodeId, StakeEntry> entries_;
  std::uint64_t burned_ = 0;
};

struct Seed {
  std::uint64_t epoch = 0;
  Hash256 value;

  bool operator==(const Seed&) const = default;
};

// Random-beacon stand-in: seed_{e+1} = SHA-256(seed_e || e+1).
Seed NextSeed(const Seed& prev);
Seed GenesisSeed(std::uint64_t scenario_seed);

struct Committee {
  ChainId chain_id = 0;
  std::uint64_t epoch = 0;
  // Ordered by election priority; the leader schedule rotates over this
  // order.
  std::vector<NodeId> members;
  std::uint32_t quorum = 0;

  NodeId leader(std::uint64_t round) const {
    return members[round % members.size()];
  }
  bool contains(NodeId n) const;
  // Largest f with 3f + 1 <= size.
  std::uint32_t max_faulty() const {
    return static_cast<std::uint32_t>((members.size() - 1) / 3);
  }
};

// floor(2n/3) + 1.
std::uint32_t QuorumSize(std::size_t members);

// Stake-weighted sampling without replacement by exponential clocks: every
// node draws u = H(seed || chain || node || 0) mapped to (0,1), gets
// priority -ln(u) / stake, and the n smallest priorities are elected.
absl::StatusOr<Committee> Elect(const Seed& seed, ChainId chain_id,
                                const StakeRegistry& registry,
                                std::uint32_t committee_size);

// Election signals recorded on the root chain. A chain signals when its
// committee nears the end of its epoch; the election uses the first seed
// published at a root height strictly above the signal's.
class ElectionBook {
 public:
  struct Signal {
    ChainId chain_id;
    std::uint64_t epoch;  // epoch being elected
    std::uint64_t root_height;
  };

  // Returns false for a duplicate (chain, epoch) signal, which is ignored.
  bool RecordSignal(ChainId chain, std::uint64_t epoch,
                    std::uint64_t root_height);
  void PublishSeed(std::uint64_t root_height, const Seed& seed);

  // Seed the election for (chain, epoch) must use, or nullopt when no seed
  // has been published after the signal yet.
  std::optional<Seed> SeedFor(ChainId chain, std::uint64_t epoch) const;
  std::optional<Signal> SignalFor(ChainId chain, std::uint64_t epoch) const;

  const std::map<std::uint64_t, Seed>& seeds() const { return seeds_; }

 private:
  std::map<std::pair<ChainId, std::uint64_t>, Signal> signals_;
  std::map<std::uint64_t, Seed> seeds_;  // by root height
};

}  // namespace thinkey::committee

#endif  // THINKEY_COMMITTEE_COMMITTEE_H_
