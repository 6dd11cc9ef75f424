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

#include <bit>
#include <cmath>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gtest/gtest.h"

namespace thinkey::committee {
namespace {

StakeRegistry Registry(const std::vector<std::uint64_t>& stakes) {
  StakeRegistry r;
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    EXPECT_TRUE(r.Register(static_cast<NodeId>(i), stakes[i],
                           Sha256(std::to_string(i)))
                    .ok());
  }
  return r;
}

int PopCount(const Hash256& h) {
  int bits = 0;
  for (std::uint8_t b : h.bytes) bits += std::popcount(b);
  return bits;
}

TEST(SeedTest, DeterministicFromGenesis) {
  EXPECT_EQ(NextSeed(GenesisSeed(42)), NextSeed(GenesisSeed(42)));
  EXPECT_NE(NextSeed(GenesisSeed(42)), NextSeed(GenesisSeed(43)));
  EXPECT_EQ(NextSeed(GenesisSeed(42)).epoch, 1u);
}

TEST(SeedTest, ThousandSeedsDistinctWithBalancedBits) {
  Seed s = GenesisSeed(1);
  std::set<Hash256> seen;
  double bits = 0;
  for (int i = 0; i < 1000; ++i) {
    s = NextSeed(s);
    EXPECT_TRUE(seen.insert(s.value).second);
    bits += PopCount(s.value);
  }
  EXPECT_NEAR(bits / 1000.0, 128.0, 12.0);
}

TEST(StakeRegistryTest, RegisterWithdrawPunish) {
  StakeRegistry r;
  EXPECT_TRUE(r.Register(1, 100, Sha256("1")).ok());
  EXPECT_EQ(r.Register(1, 5, Sha256("1")).code(),
            absl::StatusCode::kAlreadyExists);
  EXPECT_EQ(r.Register(2, 0, Sha256("2")).code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE(r.Register(2, 50, Sha256("2")).ok());
  EXPECT_EQ(r.total_frozen(), 150u);
  EXPECT_EQ(r.Punish(1, 0.5), 50u);
  EXPECT_EQ(r.stake_of(1), 50u);
  EXPECT_EQ(r.total_burned(), 50u);
  EXPECT_EQ(r.Punish(7, 0.5), 0u);
  auto released = r.Withdraw(2);
  ASSERT_TRUE(released.ok());
  EXPECT_EQ(*released, 50u);
  EXPECT_EQ(r.Withdraw(2).status().code(), absl::StatusCode::kNotFound);
  EXPECT_EQ(r.total_frozen() + r.total_burned() + *released, 150u);
}

TEST(QuorumTest, TwoThirdsPlusOne) {
  EXPECT_EQ(QuorumSize(4), 3u);
  EXPECT_EQ(QuorumSize(7), 5u);
  EXPECT_EQ(QuorumSize(13), 9u);
  EXPECT_EQ(QuorumSize(1), 1u);
  for (std::size_t n = 1; n <= 40; ++n) {
    std::uint32_t f = static_cast<std::uint32_t>((n - 1) / 3);
    // Two quorums always share an honest member.
    EXPECT_GE(2 * QuorumSize(n), n + f + 1) << n;
    // A quorum forms from honest members alone.
    EXPECT_LE(QuorumSize(n), n - f) << n;
  }
}

TEST(ElectTest, SameSeedSameCommittee) {
  StakeRegistry r = Registry(std::vector<std::uint64_t>(30, 10));
  Seed s = NextSeed(GenesisSeed(5));
  auto a = Elect(s, 3, r, 10);
  auto b = Elect(s, 3, r, 10);
  ASSERT_TRUE(a.ok());
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(a->members, b->members);
  EXPECT_EQ(a->quorum, 7u);
  EXPECT_EQ(a->epoch, 1u);
  std::set<NodeId> distinct(a->members.begin(), a->members.end());
  EXPECT_EQ(distinct.size(), 10u);
  EXPECT_NE(Elect(s, 4, r, 10)->members, a->members);
}

TEST(ElectTest, InsufficientNodes) {
  StakeRegistry r = Registry({5, 5, 5});
  EXPECT_EQ(Elect(GenesisSeed(1), 0, r, 4).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(Elect(GenesisSeed(1), 0, r, 3).ok());
}

TEST(ElectTest, EqualStakeIsUniform) {
  constexpr int kNodes = 20;
  constexpr int kSize = 4;
  constexpr int kElections = 10000;
  StakeRegistry r = Registry(std::vector<std::uint64_t>(kNodes, 7));
  std::vector<double> counts(kNodes, 0);
  Seed s = GenesisSeed(11);
  for (int i = 0; i < kElections; ++i) {
    s = NextSeed(s);
    auto c = Elect(s, 0, r, kSize);
    ASSERT_TRUE(c.ok());
    for (NodeId m : c->members) counts[m] += 1;
  }
  const double expected = static_cast<double>(kElections) * kSize / kNodes;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared dist(kNodes - 1);
  double p = boost::math::cdf(boost::math::complement(dist, chi2));
  EXPECT_GT(p, 0.01) << "chi2=" << chi2;
}

TEST(ElectTest, DominantStakeWinsSingleSeat) {
  std::vector<std::uint64_t> stakes(11, 1);
  stakes[0] = 990;  // 99% of 1000
  StakeRegistry r = Registry(stakes);
  int wins = 0;
  Seed s = GenesisSeed(3);
  for (int i = 0; i < 10000; ++i) {
    s = NextSeed(s);
    if (Elect(s, 0, r, 1)->members[0] == 0) ++wins;
  }
  EXPECT_GE(wins, 9800);
}

// The first-elected member wins an exponential race, so its distribution is
// exactly the stake share.
TEST(ElectTest, FirstSeatFrequencyMatchesStakeShare) {
  const std::vector<std::uint64_t> stakes{1, 2, 3, 4, 5, 10, 15, 20, 40};
  StakeRegistry r = Registry(stakes);
  double total = 0;
  for (auto s : stakes) total += static_cast<double>(s);
  constexpr int kElections = 10000;
  std::vector<double> first(stakes.size(), 0);
  Seed s = GenesisSeed(21);
  for (int i = 0; i < kElections; ++i) {
    s = NextSeed(s);
    auto c = Elect(s, 2, r, 3);
    ASSERT_TRUE(c.ok());
    first[c->members[0]] += 1;
  }
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    double share = static_cast<double>(stakes[i]) / total;
    double se = std::sqrt(share * (1 - share) / kElections);
    EXPECT_LT(std::abs(first[i] / kElections - share), 3 * se) << "node " << i;
  }
}

TEST(ElectTest, ConsecutiveEpochOverlapMatchesHypergeometric) {
  constexpr int kNodes = 30;
  constexpr int kSize = 10;
  constexpr int kPairs = 2000;
  StakeRegistry r = Registry(std::vector<std::uint64_t>(kNodes, 1));
  Seed s = GenesisSeed(8);
  auto prev = Elect(s, 0, r, kSize);
  double sum = 0;
  for (int i = 0; i < kPairs; ++i) {
    s = NextSeed(s);
    auto next = Elect(s, 0, r, kSize);
    std::set<NodeId> a(prev->members.begin(), prev->members.end());
    int overlap = 0;
    for (NodeId m : next->members) overlap += a.contains(m) ? 1 : 0;
    sum += overlap;
    prev = next;
  }
  // Hypergeometric overlap of two independent n-subsets of N.
  const double mean = static_cast<double>(kSize) * kSize / kNodes;
  const double var = mean * (1.0 - static_cast<double>(kSize) / kNodes) *
                     (kNodes - kSize) / (kNodes - 1.0);
  EXPECT_NEAR(sum / kPairs, mean, 4 * std::sqrt(var / kPairs));
}

TEST(ElectionBookTest, UsesFirstSeedAfterSignal) {
  ElectionBook book;
  Seed s0 = GenesisSeed(1);
  Seed s1 = NextSeed(s0);
  Seed s2 = NextSeed(s1);
  book.PublishSeed(5, s0);
  EXPECT_TRUE(book.RecordSignal(2, 3, 5));
  EXPECT_FALSE(book.SeedFor(2, 3).has_value());
  book.PublishSeed(8, s1);
  book.PublishSeed(9, s2);
  ASSERT_TRUE(book.SeedFor(2, 3).has_value());
  EXPECT_EQ(*book.SeedFor(2, 3), s1);
  EXPECT_FALSE(book.SeedFor(1, 3).has_value());
}

TEST(ElectionBookTest, DuplicateSignalIgnored) {
  ElectionBook book;
  EXPECT_TRUE(book.RecordSignal(2, 3, 5));
  EXPECT_FALSE(book.RecordSignal(2, 3, 7));
  EXPECT_EQ(book.SignalFor(2, 3)->root_height, 5u);
}

TEST(ElectionBookTest, SameBlockSignalsShareSeedButNotCommittee) {
  ElectionBook book;
  book.RecordSignal(1, 2, 4);
  book.RecordSignal(2, 2, 4);
  Seed seed = NextSeed(GenesisSeed(9));
  book.PublishSeed(5, seed);
  ASSERT_EQ(book.SeedFor(1, 2), book.SeedFor(2, 2));
  StakeRegistry r = Registry(std::vector<std::uint64_t>(40, 3));
  EXPECT_NE(Elect(*book.SeedFor(1, 2), 1, r, 8)->members,
            Elect(*book.SeedFor(2, 2), 2, r, 8)->members);
}

}  // namespace
}  // namespace thinkey::committee
