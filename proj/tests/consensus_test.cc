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

#include "thinkey/consensus/consensus.h"

#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "testing/fixtures.h"
#include "thinkey/accounts/executor.h"
#include "thinkey/committee/committee.h"

namespace thinkey::consensus {
namespace {

committee::Committee MakeCommittee(std::size_t n) {
  committee::Committee c;
  for (std::size_t i = 0; i < n; ++i) c.members.push_back(100 + i);
  c.quorum = committee::QuorumSize(n);
  return c;
}

Proposal Block(std::uint64_t round, int variant) {
  Proposal p;
  p.block_hash = Sha256Hasher()
                     .Update("test-block")
                     .UpdateU64(round)
                     .UpdateU64(static_cast<std::uint64_t>(variant))
                     .Finish();
  p.bytes = 4000;
  p.build_ms = 5;
  p.validate_ms = 5;
  return p;
}

ProposalSource ValidSource() {
  return [](std::uint64_t round, NodeId, int variant) {
    return Block(round, variant);
  };
}

ConsensusConfig Config(std::uint64_t network_seed = 1) {
  ConsensusConfig c;
  c.network_seed = network_seed;
  c.max_block_allowance_ms = 5 + 5 + 4000 / c.bandwidth_bytes_per_ms;
  return c;
}

bool Conflicting(const Evidence& e, NodeId node) {
  Signer signer(1);
  return e.first.signer == node && e.second.signer == node &&
         e.first.stage == e.second.stage && e.first.round == e.second.round &&
         e.first.payload != e.second.payload && signer.Verify(e.first) &&
         signer.Verify(e.second);
}

// Every punished node must be backed by evidence in the same decision.
void ExpectPunishmentSound(const RoundResult& r) {
  for (const auto& [member, d] : r.decisions) {
    for (const Offense& o : d.punished) {
      bool backed = false;
      for (const Evidence& e : d.evidence) {
        backed |= Conflicting(e, o.node) && e.first.stage == o.stage;
      }
      EXPECT_TRUE(backed) << "member " << member << " punished " << o.node;
    }
  }
}

TEST(SignerTest, TagsBindEveryField) {
  Signer s(9);
  SignedMessage m = s.Sign(3, 4, Stage::kPreparation, Sha256("x"));
  EXPECT_TRUE(s.Verify(m));
  SignedMessage other = m;
  other.signer = 5;
  EXPECT_FALSE(s.Verify(other));
  other = m;
  other.round = 5;
  EXPECT_FALSE(s.Verify(other));
  other = m;
  other.payload = Sha256("y");
  EXPECT_FALSE(s.Verify(other));
  EXPECT_FALSE(Signer(10).Verify(m));
}

TEST(StrategyTest, NamesRoundTrip) {
  for (Strategy s : {Strategy::kHonest, Strategy::kSilent, Strategy::kEquivocate,
                     Strategy::kRandomVote, Strategy::kSelective,
                     Strategy::kImpostor}) {
    EXPECT_EQ(ParseStrategy(StrategyName(s)), s);
  }
  EXPECT_FALSE(ParseStrategy("lazy").has_value());
}

TEST(RoundTest, FaultFreeAgrees) {
  committee::Committee c = MakeCommittee(7);
  RoundResult r = RunSingleRound(c, 0, Config(), {}, ValidSource(), 1);
  ASSERT_EQ(r.decisions.size(), 7u);
  for (const auto& [member, d] : r.decisions) {
    EXPECT_EQ(d.outcome, Outcome::kAgreedBlock);
    EXPECT_EQ(d.block_hash, Block(0, 0).block_hash);
    EXPECT_GE(d.proof.size(), c.quorum);
    EXPECT_TRUE(d.punished.empty());
    // Every vote in the certificate endorses the block.
    for (const SignedMessage& v : d.proof) {
      EXPECT_EQ(v.payload, d.block_hash);
      EXPECT_TRUE(Signer(1).Verify(v));
    }
  }
  EXPECT_EQ(r.early_outputs.size(), 7u);
  EXPECT_LE(r.completed_at - r.started_at, Config().round_budget());
}

TEST(RoundTest, SilentLeaderYieldsEmptyBlockWithFaultVotes) {
  committee::Committee c = MakeCommittee(4);
  RoundResult r = RunSingleRound(c, 0, Config(),
                                 {{c.leader(0), Strategy::kSilent}},
                                 ValidSource(), 1);
  ASSERT_EQ(r.decisions.size(), 3u);
  for (const auto& [member, d] : r.decisions) {
    EXPECT_EQ(d.outcome, Outcome::kEmptyBlock);
    EXPECT_EQ(d.proof.size(), 3u);
    for (const SignedMessage& v : d.proof) EXPECT_EQ(v.payload, FaultMarker());
    EXPECT_NE(d.justification.find("fault votes"), std::string::npos);
    EXPECT_TRUE(d.punished.empty());
  }
  EXPECT_TRUE(r.early_outputs.empty());
}

TEST(RoundTest, RotatedLeaderResumesAfterEmptyBlock) {
  committee::Committee c = MakeCommittee(4);
  sim::Simulator sim(false);
  std::map<NodeId, Strategy> byz{{c.leader(0), Strategy::kSilent}};
  std::vector<RoundResult> results;
  std::unique_ptr<RoundEngine> current;
  std::function<void(std::uint64_t, std::uint32_t)> start =
      [&](std::uint64_t round, std::uint32_t backoff) {
        ConsensusConfig config = Config();
        config.backoff_exponent = backoff;
        current = std::make_unique<RoundEngine>(sim, c, round, config, byz,
                                                ValidSource(), 1);
        current->Start([&, round](const RoundResult& r) {
          results.push_back(r);
          if (round == 0) start(1, r.agreed() ? 0 : 1);
        });
      };
  start(0, 0);
  sim.RunAll();
  ASSERT_EQ(results.size(), 2u);
  EXPECT_FALSE(results[0].agreed().has_value());
  ASSERT_TRUE(results[1].agreed().has_value());
  EXPECT_EQ(*results[1].agreed(), Block(1, 0).block_hash);
  EXPECT_NE(results[1].leader, results[0].leader);
  EXPECT_GE(results[1].started_at, results[0].completed_at);
}

TEST(RoundTest, InvalidOrderProposalDrawsFaultVotes) {
  const Address x{1};
  const Address y{2};
  chain::ChainState state =
      chain::GenesisState(0, 1, fixtures::Accounts({{x, 10}, {y, 10}}));
  auto contents = accounts::ExecuteBlock(
      state, std::vector<accounts::Message>{fixtures::Pay(x, y, 0, 1),
                                            fixtures::Pay(y, x, 0, 1)});
  ASSERT_TRUE(contents.ok());
  chain::Block block = *accounts::SealBlock(state, *contents);
  // Both accounts now receive before they send, which has no global order.
  for (auto& proc : block.procedures) std::swap(proc.steps[0], proc.steps[1]);
  auto reject = [](const accounts::Message&) { return false; };
  ASSERT_EQ(accounts::ValidateBlock(block, state, reject).failed,
            accounts::BlockCheck::kOrder);

  ProposalSource source = [&](std::uint64_t, NodeId, int) {
    Proposal p = Block(0, 0);
    p.block_hash = chain::BlockHash(block);
    p.valid = accounts::ValidateBlock(block, state, reject).ok();
    return p;
  };
  committee::Committee c = MakeCommittee(4);
  RoundResult r = RunSingleRound(c, 0, Config(), {}, source, 1);
  ASSERT_EQ(r.decisions.size(), 4u);
  for (const auto& [member, d] : r.decisions) {
    EXPECT_EQ(d.outcome, Outcome::kEmptyBlock);
    EXPECT_EQ(d.proof.size(), 4u);
  }
}

TEST(RoundTest, EquivocatingLeaderIsPunishedAndRoundAborts) {
  committee::Committee c = MakeCommittee(4);
  const NodeId leader = c.leader(0);
  RoundResult r = RunSingleRound(c, 0, Config(),
                                 {{leader, Strategy::kEquivocate}},
                                 ValidSource(), 1);
  ASSERT_EQ(r.decisions.size(), 3u);
  for (const auto& [member, d] : r.decisions) {
    EXPECT_EQ(d.outcome, Outcome::kEmptyBlock);
    EXPECT_NE(d.justification.find("equivocated"), std::string::npos);
    bool found = false;
    for (const Evidence& e : d.evidence) {
      if (e.first.stage == Stage::kProposal) {
        EXPECT_TRUE(Conflicting(e, leader));
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
  std::vector<Offense> punished = r.punished();
  ASSERT_FALSE(punished.empty());
  EXPECT_EQ(punished[0], (Offense{leader, Stage::kProposal}));
  ExpectPunishmentSound(r);

  committee::StakeRegistry registry;
  ASSERT_TRUE(registry.Register(leader, 1000, Sha256("k")).ok());
  std::set<NodeId> offenders;
  for (const Offense& o : punished) offenders.insert(o.node);
  for (NodeId node : offenders) {
    registry.Punish(node, Config().penalty_fraction);
  }
  EXPECT_EQ(registry.stake_of(leader), 500u);
  EXPECT_EQ(registry.total_burned(), 500u);
}

TEST(RoundTest, EquivocatingMemberIsPunishedWithoutBlockingAgreement) {
  committee::Committee c = MakeCommittee(7);
  const NodeId bad = c.members[3];
  RoundResult r = RunSingleRound(c, 0, Config(),
                                 {{bad, Strategy::kEquivocate}},
                                 ValidSource(), 1);
  ASSERT_TRUE(r.agreed().has_value());
  EXPECT_FALSE(r.safety_violated());
  std::vector<Offense> punished = r.punished();
  ASSERT_EQ(punished.size(), 1u);
  EXPECT_EQ(punished[0], (Offense{bad, Stage::kPreparation}));
  ExpectPunishmentSound(r);
}

TEST(RoundTest, QuorumReachedWithFSilentMembers) {
  for (std::size_t f = 1; f <= 4; ++f) {
    committee::Committee c = MakeCommittee(3 * f + 1);
    std::map<NodeId, Strategy> byz;
    for (std::size_t i = 1; i <= f; ++i) byz[c.members[i]] = Strategy::kSilent;
    RoundResult r = RunSingleRound(c, 0, Config(), byz, ValidSource(), 1);
    ASSERT_EQ(r.decisions.size(), 2 * f + 1);
    for (const auto& [member, d] : r.decisions) {
      EXPECT_EQ(d.outcome, Outcome::kAgreedBlock);
      EXPECT_EQ(d.proof.size(), c.quorum);
      EXPECT_EQ(c.quorum, 2 * f + 1);
    }
  }
}

TEST(RoundTest, ImpostorProposalDiscarded) {
  committee::Committee c = MakeCommittee(4);
  ConsensusConfig config = Config();
  config.record_trace = true;
  RoundResult r = RunSingleRound(c, 0, config,
                                 {{c.members[2], Strategy::kImpostor}},
                                 ValidSource(), 1);
  ASSERT_TRUE(r.agreed().has_value());
  EXPECT_EQ(*r.agreed(), Block(0, 0).block_hash);
  int discards = 0;
  for (const RoundTraceRecord& t : r.trace) {
    if (t.action.rfind("discard-proposal", 0) == 0) ++discards;
  }
  EXPECT_EQ(discards, 3);
}

TEST(RoundTest, EarlyOutputMatchesDecision) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    committee::Committee c = MakeCommittee(7);
    std::map<NodeId, Strategy> byz{{c.members[seed % 7], Strategy::kSelective},
                                   {c.members[(seed + 3) % 7], Strategy::kRandomVote}};
    RoundResult r = RunSingleRound(c, seed, Config(seed), byz, ValidSource(), seed);
    for (const auto& [member, early] : r.early_outputs) {
      const Decision& d = r.decisions.at(member);
      EXPECT_EQ(d.outcome, Outcome::kAgreedBlock);
      EXPECT_EQ(d.block_hash, early.block_hash);
      EXPECT_LE(early.at, d.decided_at);
      EXPECT_GE(early.proof.size(), c.quorum);
    }
  }
}

TEST(RoundTest, RandomVotersLeaveHonestDecisionsIdentical) {
  committee::Committee c = MakeCommittee(13);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    DeterministicRng rng(seed);
    std::vector<NodeId> order = c.members;
    rng.Shuffle(order);
    std::map<NodeId, Strategy> byz;
    for (int i = 0; i < 4; ++i) byz[order[i]] = Strategy::kRandomVote;
    RoundResult r = RunSingleRound(c, seed, Config(seed), byz, ValidSource(), seed);
    ASSERT_EQ(r.decisions.size(), 9u);
    const Decision& first = r.decisions.begin()->second;
    for (const auto& [member, d] : r.decisions) {
      EXPECT_EQ(d.outcome, first.outcome) << "seed " << seed;
      EXPECT_EQ(d.block_hash, first.block_hash) << "seed " << seed;
    }
    if (!byz.contains(r.leader)) EXPECT_TRUE(r.agreed().has_value());
    ExpectPunishmentSound(r);
  }
}

TEST(RoundTest, SafetyAndLivenessUnderMixedAdversaries) {
  const Strategy kStrategies[] = {Strategy::kSilent, Strategy::kEquivocate,
                                  Strategy::kRandomVote, Strategy::kSelective,
                                  Strategy::kImpostor};
  committee::Committee c = MakeCommittee(13);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    DeterministicRng rng(seed * 7919);
    std::vector<NodeId> order = c.members;
    rng.Shuffle(order);
    std::map<NodeId, Strategy> byz;
    for (int i = 0; i < 4; ++i) byz[order[i]] = kStrategies[rng.Uniform(5)];
    ConsensusConfig config = Config(seed);
    RoundResult r = RunSingleRound(c, seed, config, byz, ValidSource(), seed);
    EXPECT_FALSE(r.safety_violated()) << "seed " << seed;
    EXPECT_EQ(r.decisions.size(), 9u);
    EXPECT_LE(r.completed_at - r.started_at, config.round_budget());
    if (!byz.contains(r.leader)) {
      ASSERT_TRUE(r.agreed().has_value()) << "seed " << seed;
      for (const auto& [member, d] : r.decisions) {
        EXPECT_EQ(d.outcome, Outcome::kAgreedBlock) << "seed " << seed;
      }
    }
    ExpectPunishmentSound(r);
  }
}

TEST(RoundTest, DeterministicGivenSeeds) {
  committee::Committee c = MakeCommittee(7);
  std::map<NodeId, Strategy> byz{{c.members[1], Strategy::kRandomVote},
                                 {c.members[2], Strategy::kSelective}};
  ConsensusConfig config = Config(5);
  config.record_trace = true;
  RoundResult a = RunSingleRound(c, 3, config, byz, ValidSource(), 5);
  RoundResult b = RunSingleRound(c, 3, config, byz, ValidSource(), 5);
  std::ostringstream ta, tb;
  WriteRoundTraceJsonl(ta, a.trace);
  WriteRoundTraceJsonl(tb, b.trace);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(a.completed_at, b.completed_at);
  EXPECT_EQ(a.bytes_sent, b.bytes_sent);
}

TEST(RoundTest, TraceIsOrderedJsonl) {
  committee::Committee c = MakeCommittee(4);
  ConsensusConfig config = Config();
  config.record_trace = true;
  RoundResult r = RunSingleRound(c, 2, config, {}, ValidSource(), 1);
  std::ostringstream out;
  WriteRoundTraceJsonl(out, r.trace);
  std::istringstream in(out.str());
  std::string line;
  double last_t = 0;
  std::map<NodeId, int> stage_of;
  int lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    ++lines;
    EXPECT_EQ(j["round"], 2);
    double t = j["t"];
    EXPECT_GE(t, last_t);
    last_t = t;
    static const std::map<std::string, int> kStages{
        {"proposal", 0}, {"preparation", 1}, {"confirmation", 2}, {"decided", 3}};
    int stage = kStages.at(j["stage"].get<std::string>());
    NodeId member = j["member"];
    // Stages only move forward for a member.
    EXPECT_GE(stage, stage_of[member]);
    stage_of[member] = stage;
  }
  EXPECT_EQ(lines, static_cast<int>(r.trace.size()));
  EXPECT_EQ(stage_of.size(), 4u);
  for (const auto& [member, stage] : stage_of) EXPECT_EQ(stage, 3);
}

TEST(RoundTest, AggregationShrinksPackages) {
  committee::Committee c = MakeCommittee(13);
  ConsensusConfig agg = Config();
  ConsensusConfig plain = Config();
  plain.aggregate_signatures = false;
  RoundResult a = RunSingleRound(c, 0, agg, {}, ValidSource(), 1);
  RoundResult b = RunSingleRound(c, 0, plain, {}, ValidSource(), 1);
  EXPECT_LT(a.bytes_sent, b.bytes_sent);
  EXPECT_EQ(*a.agreed(), *b.agreed());
}

}  // namespace
}  // namespace thinkey::consensus
