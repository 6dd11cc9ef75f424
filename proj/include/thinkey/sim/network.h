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

#ifndef THINKEY_SIM_NETWORK_H_
#define THINKEY_SIM_NETWORK_H_

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "thinkey/common/types.h"

namespace thinkey::sim {

struct LatencyRange {
  double min_ms = 10.0;
  double max_ms = 100.0;

  double mean() const { return 0.5 * (min_ms + max_ms); }
};

// Uniform per-link latency. Each draw is keyed by (seed, from, to, salt) so
// a given message on a given link sees the same delay regardless of how many
// other draws happened before it.
class LatencyModel {
 public:
  LatencyModel(std::uint64_t seed, LatencyRange range)
      : seed_(seed), range_(range) {}

  SimTime Draw(std::uint64_t from, std::uint64_t to, std::uint64_t salt) const;
  const LatencyRange& range() const { return range_; }

 private:
  std::uint64_t seed_;
  LatencyRange range_;
};

// Undirected peer graph. Adjacency lists are sorted and symmetric with no
// self-loops.
class NetworkTopology {
 public:
  // Each node draws `degree` distinct random neighbors; the result is then
  // symmetrized, so realized degrees are at least `degree`.
  static absl::StatusOr<NetworkTopology> Generate(std::uint64_t seed,
                                                  std::uint32_t node_count,
                                                  std::uint32_t degree);

  // Validates symmetry and the absence of self-loops.
  static absl::StatusOr<NetworkTopology> FromAdjacency(
      std::vector<std::vector<NodeId>> adjacency);

  std::uint32_t size() const {
    return static_cast<std::uint32_t>(adjacency_.size());
  }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_[v]; }
  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(adjacency_[v].size());
  }
  std::uint32_t min_degree() const;
  double mean_degree() const;

  // Nodes reachable from `origin`, including itself, in ascending order.
  std::vector<NodeId> ReachableFrom(NodeId origin) const;

 private:
  explicit NetworkTopology(std::vector<std::vector<NodeId>> adjacency)
      : adjacency_(std::move(adjacency)) {}

  std::vector<std::vector<NodeId>> adjacency_;
};

inline constexpr std::uint32_t kFanoutAll =
    std::numeric_limits<std::uint32_t>::max();

struct GossipOptions {
  std::uint64_t seed = 1;
  // Neighbors receiving the full message; the rest receive only its hash
  // profile. kFanoutAll sends the full message to every neighbor.
  std::uint32_t full_fanout = 1;
  LatencyRange latency;
  // Applies to full pushes and profile announcements. Pull exchanges run
  // over an established request/response and are not dropped.
  double drop_prob = 0.0;
  // Link bandwidth in bytes per simulated millisecond; 0 disables the
  // transmission term.
  double bandwidth_bytes_per_ms = 1250.0;
  std::size_t profile_bytes = 32;
};

struct RedundancyReport {
  // Full copies of the message received per reachable node. The origin
  // counts its own copy.
  std::map<NodeId, std::uint32_t> per_node_full_copies;
  std::uint32_t network_size = 0;
  std::uint32_t fanout = 0;
  std::vector<NodeId> unreachable;
  std::uint64_t pull_requests = 0;
  // Nodes that sent more than one pull request; always empty.
  std::vector<NodeId> repeated_pulls;
  SimTime completion_time = 0;

  double MeanFullCopies() const;
};

// Partial broadcast of one message from `origin`. A node that first obtains
// the full message forwards it in full to `full_fanout` randomly chosen
// neighbors and sends the 32-byte profile to the others. A node that learns
// of the message only through a profile pulls it once from the announcer.
absl::StatusOr<RedundancyReport> GossipBroadcast(
    NodeId origin, std::span<const std::uint8_t> message,
    const NetworkTopology& topology, const GossipOptions& options);

// Runs independent broadcasts (one per seed, origin chosen from the seed)
// and returns the per-trial mean full copies. The parallel variant gives the
// same result as the serial one in the same order.
std::vector<double> RunGossipTrials(const NetworkTopology& topology,
                                    std::span<const std::uint64_t> seeds,
                                    std::size_t message_bytes,
                                    const GossipOptions& base,
                                    ExecutionPolicy policy);

}  // namespace thinkey::sim

#endif  // THINKEY_SIM_NETWORK_H_
