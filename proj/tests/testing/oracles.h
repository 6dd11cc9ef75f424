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

#ifndef THINKEY_TESTS_TESTING_ORACLES_H_
#define THINKEY_TESTS_TESTING_ORACLES_H_

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "thinkey/accounts/account.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/random.h"
#include "thinkey/sim/network.h"

namespace thinkey::oracles {

// Exhaustive search for a global order of the steps in `sigma` that keeps
// every account's step order and receives each message only after it was
// emitted by an earlier step or is one of `inputs`.
bool ScheduleExists(std::span<const accounts::ProcessingProcedure> sigma,
                    const std::unordered_set<Hash256>& inputs);

struct SigmaInstance {
  std::vector<accounts::ProcessingProcedure> sigma;
  std::unordered_set<Hash256> inputs;
};

// Structurally well-formed random procedures: every message is received at
// most once and emitted at most once, and inputs are never emitted. Some
// relays are left without an emitter, and a step may emit the very message
// it receives.
SigmaInstance RandomSigma(DeterministicRng& rng, int max_accounts,
                          int max_messages);

// histograms[j][x] = number of n-subsets of {0..N-1} containing exactly x
// nodes below malicious[j], by explicit walk over index combinations.
std::vector<std::vector<std::uint64_t>> MaliciousHistograms(
    std::uint32_t N, std::uint32_t n, std::span<const std::uint32_t> malicious);

// With full fanout every node forwards to all neighbors, so each reachable
// node receives one copy per neighbor and the origin also counts its own.
double FullFanoutExpectedCopies(const sim::NetworkTopology& topology,
                                NodeId origin);

}  // namespace thinkey::oracles

#endif  // THINKEY_TESTS_TESTING_ORACLES_H_
