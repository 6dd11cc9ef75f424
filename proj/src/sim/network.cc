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

#include "thinkey/sim/network.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/random.h"
#include "thinkey/sim/simulator.h"

namespace thinkey::sim {

namespace {

enum Salt : std::uint64_t {
  kFullSalt = 1,
  kProfileSalt = 2,
  kPullSalt = 3,
  kResponseSalt = 4,
  kDropSalt = 5,
  kFanoutSalt = 6,
  kOriginSalt = 7,
};

}  // namespace

SimTime LatencyModel::Draw(std::uint64_t from, std::uint64_t to,
                           std::uint64_t salt) const {
  double u = KeyedUnit(seed_, {from, to, salt});
  return range_.min_ms + (range_.max_ms - range_.min_ms) * u;
}

absl::StatusOr<NetworkTopology> NetworkTopology::Generate(
    std::uint64_t seed, std::uint32_t node_count, std::uint32_t degree) {
  if (node_count == 0) {
    return absl::InvalidArgumentError("node_count must be positive");
  }
  if (node_count > 1 && degree >= node_count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "degree ", degree, " must be below node_count ", node_count));
  }
  std::vector<std::set<NodeId>> sets(node_count);
  DeterministicRng rng(seed);
  for (NodeId v = 0; v < node_count && node_count > 1; ++v) {
    std::set<NodeId> picked;
    while (picked.size() < degree) {
      NodeId u = static_cast<NodeId>(rng.Uniform(node_count - 1));
      if (u >= v) ++u;  // skip self
      picked.insert(u);
    }
    for (NodeId u : picked) {
      sets[v].insert(u);
      sets[u].insert(v);
    }
  }
  std::vector<std::vector<NodeId>> adjacency(node_count);
  for (NodeId v = 0; v < node_count; ++v) {
    adjacency[v].assign(sets[v].begin(), sets[v].end());
  }
  return NetworkTopology(std::move(adjacency));
}

absl::StatusOr<NetworkTopology> NetworkTopology::FromAdjacency(
    std::vector<std::vector<NodeId>> adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<std::set<NodeId>> sets(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : adjacency[v]) {
      if (u >= n) {
        return absl::InvalidArgumentError(
            absl::StrCat("neighbor ", u, " of node ", v, " out of range"));
      }
      if (u == v) {
        return absl::InvalidArgumentError(
            absl::StrCat("self-loop at node ", v));
      }
      sets[v].insert(u);
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId u : sets[v]) {
      if (!sets[u].contains(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("edge ", v, "->", u, " has no reverse edge"));
      }
    }
    adjacency[v].assign(sets[v].begin(), sets[v].end());
  }
  return NetworkTopology(std::move(adjacency));
}

std::uint32_t NetworkTopology::min_degree() const {
  std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
  for (NodeId v = 0; v < size(); ++v) m = std::min(m, degree(v));
  return size() == 0 ? 0 : m;
}

double NetworkTopology::mean_degree() const {
  if (size() == 0) return 0.0;
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.size();
  return static_cast<double>(total) / size();
}

std::vector<NodeId> NetworkTopology::ReachableFrom(NodeId origin) const {
  std::vector<bool> seen(size(), false);
  std::vector<NodeId> stack{origin};
  seen[origin] = true;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : adjacency_[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

double RedundancyReport::MeanFullCopies() const {
  if (per_node_full_copies.empty()) return 0.0;
  double total = 0;
  for (const auto& [node, copies] : per_node_full_copies) total += copies;
  return total / static_cast<double>(per_node_full_copies.size());
}

namespace {

struct NodeState {
  bool has_full = false;
  bool pull_sent = false;
  std::uint32_t pulls = 0;
  std::uint32_t full_copies = 0;
};

class GossipRun {
 public:
  GossipRun(const NetworkTopology& topology, const GossipOptions& options,
            std::size_t message_bytes, std::uint64_t message_key)
      : topology_(topology),
        options_(options),
        latency_(MixKey(options.seed, {message_key}), options.latency),
        message_bytes_(message_bytes),
        message_key_(message_key),
        nodes_(topology.size()),
        sim_(/*record_log=*/false) {}

  RedundancyReport Run(NodeId origin) {
    NodeState& o = nodes_[origin];
    o.full_copies = 1;
    ObtainFull(origin);
    sim_.RunAll();

    RedundancyReport report;
    report.network_size = topology_.size();
    report.fanout = options_.full_fanout;
    report.completion_time = completion_time_;
    for (NodeId v = 0; v < topology_.size(); ++v) {
      const NodeState& s = nodes_[v];
      report.pull_requests += s.pulls;
      if (s.pulls > 1) report.repeated_pulls.push_back(v);
      if (s.has_full) {
        report.per_node_full_copies[v] = s.full_copies;
      } else {
        report.unreachable.push_back(v);
      }
    }
    return report;
  }

 private:
  SimTime TransferTime(std::size_t bytes) const {
    if (options_.bandwidth_bytes_per_ms <= 0) return 0;
    return static_cast<double>(bytes) / options_.bandwidth_bytes_per_ms;
  }

  bool Dropped(NodeId from, NodeId to, std::uint64_t salt) const {
    if (options_.drop_prob <= 0) return false;
    return KeyedUnit(options_.seed,
                     {message_key_, from, to, salt, kDropSalt}) <
           options_.drop_prob;
  }

  void ObtainFull(NodeId v) {
    NodeState& s = nodes_[v];
    if (s.has_full) return;
    s.has_full = true;
    completion_time_ = std::max(completion_time_, sim_.now());

    std::vector<NodeId> peers = topology_.neighbors(v);
    DeterministicRng rng(MixKey(options_.seed, {message_key_, v, kFanoutSalt}));
    rng.Shuffle(peers);
    std::size_t full =
        std::min<std::size_t>(options_.full_fanout, peers.size());
    for (std::size_t i = 0; i < peers.size(); ++i) {
      NodeId u = peers[i];
      bool send_full = i < full;
      std::uint64_t salt = send_full ? kFullSalt : kProfileSalt;
      if (Dropped(v, u, salt)) continue;
      SimTime delay = latency_.Draw(v, u, salt) +
                      TransferTime(send_full ? message_bytes_
                                             : options_.profile_bytes);
      if (send_full) {
        sim_.After(delay, u, "full", [this, u] { OnFull(u); });
      } else {
        sim_.After(delay, u, "profile", [this, u, v] { OnProfile(u, v); });
      }
    }
  }

  void OnFull(NodeId v) {
    ++nodes_[v].full_copies;
    ObtainFull(v);
  }

  void OnProfile(NodeId v, NodeId announcer) {
    NodeState& s = nodes_[v];
    if (s.has_full || s.pull_sent) return;
    s.pull_sent = true;
    ++s.pulls;
    SimTime request = latency_.Draw(v, announcer, kPullSalt) +
                      TransferTime(options_.profile_bytes);
    SimTime response = latency_.Draw(announcer, v, kResponseSalt) +
                       TransferTime(message_bytes_);
    sim_.After(request + response, v, "pull_response",
               [this, v] { OnFull(v); });
  }

  const NetworkTopology& topology_;
  const GossipOptions& options_;
  LatencyModel latency_;
  std::size_t message_bytes_;
  std::uint64_t message_key_;
  std::vector<NodeState> nodes_;
  Simulator sim_;
  SimTime completion_time_ = 0;
};

}  // namespace

absl::StatusOr<RedundancyReport> GossipBroadcast(
    NodeId origin, std::span<const std::uint8_t> message,
    const NetworkTopology& topology, const GossipOptions& options) {
  if (origin >= topology.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("origin ", origin, " not in topology of size ",
                     topology.size()));
  }
  if (message.empty()) {
    return absl::InvalidArgumentError("gossip message must be nonempty");
  }
  // Message identity is its content hash.
  std::uint64_t key = Sha256(message).Prefix64();
  GossipRun run(topology, options, message.size(), key);
  return run.Run(origin);
}

std::vector<double> RunGossipTrials(const NetworkTopology& topology,
                                    std::span<const std::uint64_t> seeds,
                                    std::size_t message_bytes,
                                    const GossipOptions& base,
                                    ExecutionPolicy policy) {
  std::vector<double> out(seeds.size(), 0.0);
  auto trial = [&](std::size_t i) {
    GossipOptions opts = base;
    opts.seed = seeds[i];
    NodeId origin = static_cast<NodeId>(
        MixKey(seeds[i], {kOriginSalt}) % topology.size());
    GossipRun run(topology, opts, message_bytes, MixKey(seeds[i], {0}));
    out[i] = run.Run(origin).MeanFullCopies();
  };
  const std::int64_t n = static_cast<std::int64_t>(seeds.size());
  if (policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) trial(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < n; ++i) trial(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace thinkey::sim
