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

#include "testing/oracles.h"

#include <algorithm>
#include <functional>
#include <set>
#include <string>

namespace thinkey::oracles {

using accounts::ProcedureStep;
using accounts::ProcessingProcedure;

bool ScheduleExists(std::span<const ProcessingProcedure> sigma,
                    const std::unordered_set<Hash256>& inputs) {
  std::vector<std::size_t> pos(sigma.size(), 0);
  std::set<std::vector<std::size_t>> dead;
  std::function<bool()> search = [&]() -> bool {
    bool done = true;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      done = done && pos[i] == sigma[i].steps.size();
    }
    if (done) return true;
    if (dead.contains(pos)) return false;
    std::unordered_set<Hash256> available = inputs;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      for (std::size_t k = 0; k < pos[i]; ++k) {
        for (const Hash256& e : sigma[i].steps[k].emitted) available.insert(e);
      }
    }
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      if (pos[i] == sigma[i].steps.size()) continue;
      if (!available.contains(sigma[i].steps[pos[i]].received)) continue;
      ++pos[i];
      if (search()) return true;
      --pos[i];
    }
    dead.insert(pos);
    return false;
  };
  return search();
}

SigmaInstance RandomSigma(DeterministicRng& rng, int max_accounts,
                          int max_messages) {
  const int accounts = 1 + static_cast<int>(rng.Uniform(max_accounts));
  const int messages = 1 + static_cast<int>(rng.Uniform(max_messages));
  std::vector<Hash256> ids;
  std::vector<bool> is_input;
  for (int i = 0; i < messages; ++i) {
    ids.push_back(Sha256("oracle-msg-" + std::to_string(i)));
    is_input.push_back(rng.Bernoulli(0.4));
  }

  SigmaInstance out;
  out.sigma.resize(accounts);
  for (int a = 0; a < accounts; ++a) out.sigma[a].account = Address{std::uint64_t(a + 1)};
  for (int i = 0; i < messages; ++i) {
    if (is_input[i]) out.inputs.insert(ids[i]);
    if (!rng.Bernoulli(0.9)) continue;
    auto& steps = out.sigma[rng.Uniform(accounts)].steps;
    ProcedureStep step;
    step.received = ids[i];
    steps.insert(steps.begin() + rng.Uniform(steps.size() + 1), step);
  }
  std::vector<ProcedureStep*> all_steps;
  for (auto& p : out.sigma) {
    for (auto& s : p.steps) all_steps.push_back(&s);
  }
  for (int i = 0; i < messages; ++i) {
    if (is_input[i] || all_steps.empty() || rng.Bernoulli(0.05)) continue;
    all_steps[rng.Uniform(all_steps.size())]->emitted.push_back(ids[i]);
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> MaliciousHistograms(
    std::uint32_t N, std::uint32_t n, std::span<const std::uint32_t> malicious) {
  std::vector<std::vector<std::uint64_t>> hist(
      malicious.size(), std::vector<std::uint64_t>(n + 1, 0));
  if (n > N) return hist;
  std::vector<std::uint32_t> idx(n);
  for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
  while (true) {
    for (std::size_t j = 0; j < malicious.size(); ++j) {
      std::uint32_t bad = 0;
      for (std::uint32_t v : idx) bad += v < malicious[j] ? 1 : 0;
      ++hist[j][bad];
    }
    // Advance to the next combination in lexicographic order.
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && idx[i] == N - n + static_cast<std::uint32_t>(i)) --i;
    if (i < 0) break;
    ++idx[i];
    for (std::uint32_t k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
  }
  return hist;
}

double FullFanoutExpectedCopies(const sim::NetworkTopology& topology,
                                NodeId origin) {
  std::vector<NodeId> reach = topology.ReachableFrom(origin);
  double copies = 1.0;
  for (NodeId v : reach) copies += topology.degree(v);
  return copies / static_cast<double>(reach.size());
}

}  // namespace thinkey::oracles
