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

#include "thinkey/committee/security.h"

#include <vector>

#include "gtest/gtest.h"
#include "testing/oracles.h"

namespace thinkey::committee {
namespace {

FailureParams Params(std::uint64_t N, std::uint64_t n, double lambda,
                     double rho) {
  FailureParams p;
  p.total_nodes = N;
  p.committee_size = n;
  p.lambda = lambda;
  p.rho = rho;
  return p;
}

// Failure probability from the oracle's committee histogram.
Rational OracleProbability(std::uint32_t N, std::uint32_t n, std::uint32_t M,
                           std::uint32_t t) {
  std::vector<std::uint32_t> ms{M};
  auto hist = oracles::MaliciousHistograms(N, n, ms)[0];
  BigInt failing = 0;
  BigInt total = 0;
  for (std::size_t x = 0; x < hist.size(); ++x) {
    total += hist[x];
    if (x > t) failing += hist[x];
  }
  return Rational(failing, total);
}

TEST(FailureParamsTest, Validation) {
  EXPECT_TRUE(ValidateFailureParams(Params(20, 5, 0.25, 0.2)).ok());
  EXPECT_FALSE(ValidateFailureParams(Params(20, 21, 0.25, 0.2)).ok());
  EXPECT_FALSE(ValidateFailureParams(Params(20, 5, 1.0, 0.2)).ok());
  EXPECT_FALSE(ValidateFailureParams(Params(20, 5, 0.2, 0.0)).ok());
  EXPECT_FALSE(ValidateFailureParams(Params(0, 0, 0.2, 0.3)).ok());
}

TEST(FailureParamsTest, RoundingRules) {
  EXPECT_EQ(MaliciousCount(Params(10, 3, 0.25, 0.2)), 3u);  // 2.5 rounds up
  EXPECT_EQ(MaliciousCount(Params(22, 3, 0.1, 0.2)), 2u);
  EXPECT_EQ(ToleratedCount(Params(20, 6, 0.1, 1.0 / 3.0)), 2u);
  EXPECT_EQ(ToleratedCount(Params(20, 5, 0.1, 0.2)), 1u);
  EXPECT_EQ(ToleratedCount(Params(20, 8, 0.1, 0.2)), 1u);
}

TEST(FailureProbabilityTest, TrivialZeros) {
  EXPECT_EQ(FailureProbabilityExact(Params(20, 5, 0.0, 0.2)), 0);
  // One malicious node cannot exceed a tolerance of one.
  EXPECT_EQ(FailureProbabilityExact(Params(20, 5, 0.05, 0.2)), 0);
}

TEST(FailureProbabilityTest, TwentyChooseFiveMatchesEnumeration) {
  FailureParams p = Params(20, 5, 0.25, 0.2);
  EnumerationCount count =
      CountFailedCommittees(20, 5, 5, 1, ExecutionPolicy::kSerial);
  EXPECT_EQ(count.total, 15504u);
  EXPECT_EQ(FailureProbabilityExact(p), count.probability());
  EXPECT_EQ(FailureProbabilityExact(p), OracleProbability(20, 5, 5, 1));
  // 1 - [C(15,5) + 5 C(15,4)] / C(20,5) = 1 - 9828/15504.
  EXPECT_EQ(FailureProbabilityExact(p), Rational(5676, 15504));
}

TEST(SystemFailureBoundTest, UnionBound) {
  Rational p = FailureProbabilityExact(Params(20, 5, 0.25, 0.2));
  EXPECT_EQ(SystemFailureBoundExact(1, p), p);
  EXPECT_EQ(SystemFailureBoundExact(7, 0), 0);
  EXPECT_EQ(SystemFailureBoundExact(16, p), 1);  // 16 * 0.366 clips
  Rational small = FailureProbabilityExact(Params(24, 8, 0.1, 1.0 / 3.0));
  ASSERT_LT(small * 16, 1);
  EXPECT_EQ(SystemFailureBoundExact(16, small), small * 16);
  EXPECT_DOUBLE_EQ(SystemFailureBound(16, 0.01), 0.16);
  EXPECT_DOUBLE_EQ(SystemFailureBound(16, 0.1), 1.0);
}

TEST(FailureProbabilityTest, GridMatchesEnumerationExactly) {
  const double lambdas[] = {0.0, 0.1, 0.25, 0.4};
  const double rhos[] = {0.2, 1.0 / 3.0};
  for (std::uint32_t N = 10; N <= 24; ++N) {
    for (std::uint32_t n = 3; n <= 8; ++n) {
      for (double lambda : lambdas) {
        for (double rho : rhos) {
          FailureParams p = Params(N, n, lambda, rho);
          auto M = static_cast<std::uint32_t>(MaliciousCount(p));
          auto t = static_cast<std::uint32_t>(ToleratedCount(p));
          EnumerationCount c =
              CountFailedCommittees(N, M, n, t, ExecutionPolicy::kParallel);
          ASSERT_EQ(FailureProbabilityExact(p), c.probability())
              << "N=" << N << " n=" << n << " lambda=" << lambda
              << " rho=" << rho;
        }
      }
    }
  }
}

TEST(FailureProbabilityTest, EnumerationAgreesWithOracle) {
  for (std::uint32_t N = 6; N <= 16; N += 2) {
    for (std::uint32_t n = 1; n <= 6; ++n) {
      for (std::uint32_t M = 0; M <= N / 2; ++M) {
        for (std::uint32_t t = 0; t < n; ++t) {
          auto serial =
              CountFailedCommittees(N, M, n, t, ExecutionPolicy::kSerial);
          auto parallel =
              CountFailedCommittees(N, M, n, t, ExecutionPolicy::kParallel);
          EXPECT_EQ(serial.failing, parallel.failing);
          EXPECT_EQ(serial.total, parallel.total);
          EXPECT_EQ(serial.probability(), OracleProbability(N, n, M, t));
        }
      }
    }
  }
}

TEST(FailureProbabilityTest, MonotoneInLambdaAndRho) {
  for (std::uint64_t N = 10; N <= 60; N += 10) {
    for (std::uint64_t n = 3; n <= 10; ++n) {
      Rational prev = -1;
      for (int l = 0; l < 20; ++l) {
        Rational cur = FailureProbabilityExact(Params(N, n, l * 0.05, 0.3));
        EXPECT_GE(cur, prev);
        EXPECT_GE(cur, 0);
        EXPECT_LE(cur, 1);
        prev = cur;
      }
      prev = 2;
      for (int r = 1; r < 20; ++r) {
        Rational cur = FailureProbabilityExact(Params(N, n, 0.3, r * 0.05));
        EXPECT_LE(cur, prev);
        prev = cur;
      }
    }
  }
}

TEST(FailureProbabilityTest, DoubleApproximatesExact) {
  FailureParams p = Params(400, 40, 0.2, 1.0 / 3.0);
  double exact = FailureProbabilityExact(p).convert_to<double>();
  EXPECT_GT(exact, 0.0);
  EXPECT_LT(exact, 0.05);
  EXPECT_DOUBLE_EQ(FailureProbability(p), exact);
}

}  // namespace
}  // namespace thinkey::committee
