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

// Serial reference kernels against their OpenMP counterparts. The second
// benchmark argument selects the policy: 0 serial, 1 parallel.

#include <cstdint>
#include <vector>

#include "benchmark/benchmark.h"
#include "thinkey/accounts/executor.h"
#include "thinkey/accounts/message.h"
#include "thinkey/chain/block.h"
#include "thinkey/chain/merkle.h"
#include "thinkey/committee/security.h"
#include "thinkey/common/random.h"
#include "thinkey/sim/network.h"

namespace thinkey {
namespace {

ExecutionPolicy PolicyArg(const benchmark::State& state) {
  return state.range(1) == 0 ? ExecutionPolicy::kSerial
                             : ExecutionPolicy::kParallel;
}

void BM_HashLeaves(benchmark::State& state) {
  std::vector<chain::Leaf> leaves(static_cast<std::size_t>(state.range(0)));
  DeterministicRng rng(1);
  for (chain::Leaf& l : leaves) {
    l.resize(256);
    for (std::uint8_t& b : l) b = static_cast<std::uint8_t>(rng.Uniform(256));
  }
  const ExecutionPolicy policy = PolicyArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain::BuildMerkle(leaves, policy));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HashLeaves)->ArgsProduct({{1 << 10, 1 << 14}, {0, 1}});

// A chain with `payers` funded accounts, each paying a local account once.
struct ReplayFixture {
  chain::ChainState state;
  chain::Block block;

  explicit ReplayFixture(std::uint64_t payers) {
    chain::AccountMap accounts;
    for (std::uint64_t a = 1; a <= 2 * payers; ++a) {
      accounts::Account acct = accounts::NewAccount(Address{a});
      acct.balance = 1000;
      accounts.emplace(Address{a}, acct);
    }
    state = chain::GenesisState(0, 1, accounts);
    std::vector<accounts::Message> inputs;
    for (std::uint64_t a = 1; a <= payers; ++a) {
      inputs.push_back(accounts::MakeExternal(
          Address{a}, Address{a}, 0, accounts::Tran(Address{a + payers}, 7)));
    }
    absl::StatusOr<accounts::BlockContents> contents =
        accounts::ExecuteBlock(state, inputs);
    block = *accounts::SealBlock(state, *contents);
  }
};

void BM_ValidateBlock(benchmark::State& state) {
  ReplayFixture f(static_cast<std::uint64_t>(state.range(0)));
  const ExecutionPolicy policy = PolicyArg(state);
  auto no_relays = [](const accounts::Message&) { return false; };
  for (auto _ : state) {
    accounts::BlockVerdict v =
        accounts::ValidateBlock(f.block, f.state, no_relays, policy);
    if (!v.ok()) state.SkipWithError(v.detail.c_str());
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValidateBlock)->ArgsProduct({{256, 2048}, {0, 1}});

void BM_CountFailedCommittees(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const ExecutionPolicy policy = PolicyArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        committee::CountFailedCommittees(24, 6, n, n / 3, policy));
  }
}
BENCHMARK(BM_CountFailedCommittees)->ArgsProduct({{6, 8}, {0, 1}});

void BM_GossipTrials(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  absl::StatusOr<sim::NetworkTopology> topo =
      sim::NetworkTopology::Generate(5, n, 10);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 1; i <= 16; ++i) seeds.push_back(i);
  const ExecutionPolicy policy = PolicyArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::RunGossipTrials(*topo, seeds, 512, sim::GossipOptions{}, policy));
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_GossipTrials)->ArgsProduct({{400, 1000}, {0, 1}});

}  // namespace
}  // namespace thinkey

BENCHMARK_MAIN();
