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

#include "thinkey/committee/committee.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace thinkey::committee {

absl::Status StakeRegistry::Register(NodeId node, std::uint64_t stake,
                                     Hash256 public_key) {
  if (stake == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("node ", node, " registered with zero stake"));
  }
  if (entries_.contains(node)) {
    return absl::AlreadyExistsError(absl::StrCat("node ", node, " registered twice"));
  }
  entries_.emplace(node, StakeEntry{stake, public_key, true});
  return absl::OkStatus();
}

absl::StatusOr<std::uint64_t> StakeRegistry::Withdraw(NodeId node) {
  auto it = entries_.find(node);
  if (it == entries_.end()) {
    return absl::NotFoundError(absl::StrCat("node ", node, " not registered"));
  }
  std::uint64_t released = it->second.stake;
  entries_.erase(it);
  return released;
}

std::uint64_t StakeRegistry::Punish(NodeId node, double fraction) {
  auto it = entries_.find(node);
  if (it == entries_.end()) return 0;
  auto penalty = static_cast<std::uint64_t>(
      std::floor(static_cast<double>(it->second.stake) * fraction));
  penalty = std::min(penalty, it->second.stake);
  it->second.stake -= penalty;
  burned_ += penalty;
  return penalty;
}

std::uint64_t StakeRegistry::stake_of(NodeId node) const {
  auto it = entries_.find(node);
  return it == entries_.end() ? 0 : it->second.stake;
}

std::uint64_t StakeRegistry::total_frozen() const {
  std::uint64_t total = 0;
  for (const auto& [node, e] : entries_) {
    if (e.frozen) total += e.stake;
  }
  return total;
}

Seed NextSeed(const Seed& prev) {
  Seed next;
  next.epoch = prev.epoch + 1;
  next.value =
      Sha256Hasher().Update(prev.value).UpdateU64(next.epoch).Finish();
  return next;
}

Seed GenesisSeed(std::uint64_t scenario_seed) {
  return Seed{0, Sha256Hasher()
                     .Update("thinkey-genesis-seed")
                     .UpdateU64(scenario_seed)
                     .Finish()};
}

bool Committee::contains(NodeId n) const {
  return std::find(members.begin(), members.end(), n) != members.end();
}

std::uint32_t QuorumSize(std::size_t members) {
  return static_cast<std::uint32_t>(2 * members / 3 + 1);
}

absl::StatusOr<Committee> Elect(const Seed& seed, ChainId chain_id,
                                const StakeRegistry& registry,
                                std::uint32_t committee_size) {
  std::vector<std::pair<double, NodeId>> priorities;
  for (const auto& [node, entry] : registry.entries()) {
    if (entry.stake == 0 || !entry.frozen) continue;
    Hash256 h = Sha256Hasher()
                    .Update(seed.value)
                    .UpdateU64(chain_id)
                    .UpdateU64(node)
                    .UpdateU64(0)
                    .Finish();
    double u = HashToUnitInterval(h);
    double priority = -std::log(u) / static_cast<double>(entry.stake);
    priorities.emplace_back(priority, node);
  }
  if (committee_size == 0 || priorities.size() < committee_size) {
    return absl::FailedPreconditionError(absl::StrCat(
        "need ", committee_size, " eligible nodes, registry has ",
        priorities.size()));
  }
  std::partial_sort(priorities.begin(), priorities.begin() + committee_size,
                    priorities.end());
  Committee c;
  c.chain_id = chain_id;
  c.epoch = seed.epoch;
  for (std::uint32_t i = 0; i < committee_size; ++i) {
    c.members.push_back(priorities[i].second);
  }
  c.quorum = QuorumSize(c.members.size());
  return c;
}

bool ElectionBook::RecordSignal(ChainId chain, std::uint64_t epoch,
                                std::uint64_t root_height) {
  return signals_.try_emplace({chain, epoch}, Signal{chain, epoch, root_height})
      .second;
}

void ElectionBook::PublishSeed(std::uint64_t root_height, const Seed& seed) {
  seeds_.emplace(root_height, seed);
}

std::optional<ElectionBook::Signal> ElectionBook::SignalFor(
    ChainId chain, std::uint64_t epoch) const {
  auto it = signals_.find({chain, epoch});
  if (it == signals_.end()) return std::nullopt;
  return it->second;
}

std::optional<Seed> ElectionBook::SeedFor(ChainId chain,
                                          std::uint64_t epoch) const {
  auto sig = SignalFor(chain, epoch);
  if (!sig) return std::nullopt;
  auto it = seeds_.upper_bound(sig->root_height);
  if (it == seeds_.end()) return std::nullopt;
  return it->second;
}

}  // namespace thinkey::committee
