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

#include "thinkey/chain/block.h"

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "testing/fixtures.h"
#include "thinkey/accounts/executor.h"
#include "thinkey/chain/merkle.h"
#include "thinkey/common/random.h"

namespace thinkey::chain {
namespace {

using accounts::ExecuteBlock;
using accounts::Message;
using accounts::SealBlock;
using fixtures::AddressOnChain;

constexpr std::uint32_t kChains = 2;

TEST(BlockTest, GenesisHasHeightZeroAndNullParent) {
  ChainState s = GenesisState(0, kChains, {});
  ASSERT_TRUE(s.tip.has_value());
  EXPECT_EQ(s.tip->height, 0u);
  EXPECT_TRUE(GenesisBlock(0, {}).parent_digest.IsZero());
  EXPECT_EQ(s.next_height(), 1u);
}

TEST(BlockTest, EmptyContentsSealToSentinelRoots) {
  ChainState s = GenesisState(0, kChains, {});
  auto contents = ExecuteBlock(s, {});
  ASSERT_TRUE(contents.ok());
  auto block = SealBlock(s, *contents);
  ASSERT_TRUE(block.ok());
  EXPECT_EQ(block->height, 1u);
  EXPECT_EQ(block->outer_relay_root, EmptyRoot());
  EXPECT_EQ(block->state_root, EmptyRoot());
  EXPECT_EQ(block->parent_digest, s.tip->block_hash);
  EXPECT_TRUE(block->procedures.empty());
}

TEST(BlockTest, PaymentBlockRelayRootMatchesRebuiltTree) {
  Address alice = AddressOnChain(0, kChains);
  Address bob = AddressOnChain(1, kChains);
  Address carol = AddressOnChain(1, kChains, 1, 1);
  ChainState s = GenesisState(0, kChains, fixtures::Accounts({{alice, 100}}));
  std::vector<Message> inputs{fixtures::Pay(alice, bob, 0, 10),
                              fixtures::Pay(alice, carol, 1, 15)};
  auto contents = ExecuteBlock(s, inputs);
  ASSERT_TRUE(contents.ok());
  auto block = SealBlock(s, *contents);
  ASSERT_TRUE(block.ok());
  ASSERT_EQ(block->outer_relay.size(), 2u);

  std::vector<Leaf> leaves;
  for (const Message& m : block->outer_relay) {
    leaves.push_back(accounts::EncodeContent(m));
  }
  Hash256 rebuilt = HashNode(HashLeaf(leaves[0]), HashLeaf(leaves[1]));
  EXPECT_EQ(block->outer_relay_root, rebuilt);
  EXPECT_EQ(block->outer_relay_root, BuildMerkle(leaves));
}

TEST(BlockTest, TamperedProcedureListRejectedBySeal) {
  Address alice = AddressOnChain(0, kChains);
  Address bob = AddressOnChain(1, kChains);
  ChainState s = GenesisState(0, kChains, fixtures::Accounts({{alice, 100}}));
  std::vector<Message> inputs{fixtures::Pay(alice, bob, 0, 10)};
  auto contents = ExecuteBlock(s, inputs);
  ASSERT_TRUE(contents.ok());

  accounts::BlockContents dropped = *contents;
  dropped.procedures[0].steps[0].emitted.clear();
  EXPECT_FALSE(SealBlock(s, dropped).ok());

  accounts::BlockContents forged_root = *contents;
  forged_root.declared_state_root = Sha256("forged");
  EXPECT_FALSE(SealBlock(s, forged_root).ok());
}

Block SampleBlock() {
  Address alice = AddressOnChain(0, kChains);
  Address bob = AddressOnChain(1, kChains);
  Address dave = AddressOnChain(0, kChains, 1, 1);
  ChainState s = GenesisState(0, kChains, fixtures::Accounts({{alice, 100}}));
  std::vector<Message> inputs{fixtures::Pay(alice, bob, 0, 10),
                              fixtures::Pay(alice, dave, 1, 5)};
  auto contents = ExecuteBlock(s, inputs);
  return *SealBlock(s, *contents);
}

TEST(BlockTest, BlockHashBindsEveryField) {
  const Block base = SampleBlock();
  const Hash256 h = BlockHash(base);
  std::vector<std::function<void(Block&)>> mutations{
      [](Block& b) { b.chain_id ^= 1; },
      [](Block& b) { ++b.height; },
      [](Block& b) { b.parent_digest.bytes[3] ^= 1; },
      [](Block& b) { b.input_messages.pop_back(); },
      [](Block& b) { std::swap(b.input_messages[0], b.input_messages[1]); },
      [](Block& b) { b.input_messages[0].input.args[1] += 1; },
      [](Block& b) {
        std::get<accounts::Signature>(b.input_messages[0].verification)
            .tag.bytes[0] ^= 1;
      },
      [](Block& b) { b.procedures[0].steps[0].fault = true; },
      [](Block& b) { b.procedures[0].account.value += 1; },
      [](Block& b) { b.inter_relay.clear(); },
      [](Block& b) { b.outer_relay[0].input.args[0] += 1; },
      [](Block& b) { b.outer_relay_root.bytes[31] ^= 0x80; },
      [](Block& b) { b.state_root.bytes[0] ^= 0x01; },
  };
  for (std::size_t i = 0; i < mutations.size(); ++i) {
    Block b = base;
    mutations[i](b);
    EXPECT_NE(BlockHash(b), h) << "mutation " << i;
  }
  // The committee proof attests to the hash and is not part of it.
  Block attested = base;
  attested.committee_proof.signers = {1, 2, 3};
  EXPECT_EQ(BlockHash(attested), h);
}

TEST(BlockTest, RandomizedByteMutationsChangeHash) {
  const Block base = SampleBlock();
  const Hash256 h = BlockHash(base);
  DeterministicRng rng(5);
  for (int i = 0; i < 200; ++i) {
    Block b = base;
    switch (rng.Uniform(4)) {
      case 0:
        b.parent_digest.bytes[rng.Uniform(32)] ^= 1 + rng.Uniform(255);
        break;
      case 1:
        b.state_root.bytes[rng.Uniform(32)] ^= 1 + rng.Uniform(255);
        break;
      case 2:
        b.procedures[rng.Uniform(b.procedures.size())]
            .steps[0].received.bytes[rng.Uniform(32)] ^= 1 + rng.Uniform(255);
        break;
      default:
        b.height += 1 + rng.Uniform(1000);
    }
    EXPECT_NE(BlockHash(b), h);
  }
}

TEST(BlockTest, ChainLinearityOverManyBlocks) {
  Address alice = AddressOnChain(0, 1);
  Address bob = AddressOnChain(0, 1, 1, 1);
  ChainState s = GenesisState(0, 1, fixtures::Accounts({{alice, 1000}}));
  std::vector<Digest> digests{*s.tip};
  constexpr int kBlocks = 12;
  for (int k = 0; k < kBlocks; ++k) {
    std::vector<Message> inputs{fixtures::Pay(alice, bob, k, 1)};
    auto contents = ExecuteBlock(s, inputs);
    ASSERT_TRUE(contents.ok());
    auto block = SealBlock(s, *contents);
    ASSERT_TRUE(block.ok());
    EXPECT_EQ(block->parent_digest, digests.back().block_hash);
    ASSERT_TRUE(accounts::CommitBlock(s, *block, *contents).ok());
    digests.push_back(*s.tip);
  }
  for (std::size_t i = 0; i < digests.size(); ++i) {
    EXPECT_EQ(digests[i].height, i);
  }
  EXPECT_EQ(s.accounts.at(bob).balance, static_cast<std::uint64_t>(kBlocks));
  EXPECT_EQ(s.accounts.at(alice).nonce, static_cast<std::uint64_t>(kBlocks));
}

TEST(BlockTest, AppendRejectsWrongHeightParentAndChain) {
  ChainState s = GenesisState(0, kChains, {});
  auto contents = ExecuteBlock(s, {});
  Block b = *SealBlock(s, *contents);

  Block wrong_height = b;
  wrong_height.height = 5;
  EXPECT_FALSE(AppendBlock(s, wrong_height).ok());
  Block wrong_parent = b;
  wrong_parent.parent_digest = Sha256("x");
  EXPECT_FALSE(AppendBlock(s, wrong_parent).ok());
  Block wrong_chain = b;
  wrong_chain.chain_id = 1;
  EXPECT_FALSE(AppendBlock(s, wrong_chain).ok());
  Block bad_root = b;
  bad_root.outer_relay_root = Sha256("y");
  EXPECT_FALSE(AppendBlock(s, bad_root).ok());
  EXPECT_TRUE(AppendBlock(s, b).ok());
}

TEST(BlockTest, ShapeChecksRelayRouting) {
  Address alice = AddressOnChain(0, kChains);
  Address bob = AddressOnChain(1, kChains);
  Block b;
  b.chain_id = 0;
  b.inter_relay.push_back(
      accounts::MakeRelay(alice, bob, accounts::Add(1), Sha256("c"), 0));
  b.outer_relay_root = EmptyRoot();
  EXPECT_FALSE(CheckBlockShape(b, kChains).ok());

  Block c;
  c.chain_id = 0;
  c.outer_relay.push_back(
      accounts::MakeRelay(bob, alice, accounts::Add(1), Sha256("c"), 0));
  c.outer_relay_root = RelayRoot(c.outer_relay);
  EXPECT_FALSE(CheckBlockShape(c, kChains).ok());
}

TEST(BlockTest, StateRootIsMerkleOverOrderedAccounts) {
  Address a{3}, b{1}, c{2};
  AccountMap accounts = fixtures::Accounts({{a, 5}, {b, 6}, {c, 7}});
  std::vector<Leaf> leaves{accounts::EncodeAccount(accounts.at(b)),
                           accounts::EncodeAccount(accounts.at(c)),
                           accounts::EncodeAccount(accounts.at(a))};
  EXPECT_EQ(StateRoot(accounts), BuildMerkle(leaves));
  EXPECT_EQ(StateRoot(accounts, ExecutionPolicy::kParallel), StateRoot(accounts));
}

TEST(BlockTest, JsonExportsAreCanonical) {
  Block b = SampleBlock();
  auto j = nlohmann::json::parse(BlockJson(b));
  EXPECT_EQ(j["height"], 1);
  EXPECT_EQ(j["digest"]["block_hash"], BlockHash(b).ToHex());
  EXPECT_EQ(j["input_messages"].size(), 2u);
  EXPECT_EQ(BlockJson(b), BlockJson(b));
  // Keys are emitted in sorted order.
  std::string digest = DigestJson(DigestOf(b));
  EXPECT_LT(digest.find("block_hash"), digest.find("chain_id"));
  EXPECT_LT(digest.find("outer_relay_root"), digest.find("state_root"));
}

}  // namespace
}  // namespace thinkey::chain
