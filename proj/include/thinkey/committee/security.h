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

#ifndef THINKEY_COMMITTEE_SECURITY_H_
#define THINKEY_COMMITTEE_SECURITY_H_

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "absl/status/status.h"
#include "thinkey/common/types.h"

namespace thinkey::committee {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Committee failure model: N nodes of which round(lambda*N) are malicious,
// a committee of n drawn uniformly without replacement, m committees. A
// committee fails when more than floor(rho*n) of its members are malicious.
struct FailureParams {
  std::uint64_t total_nodes = 0;     // N
  std::uint64_t committee_size = 0;  // n
  std::uint64_t committees = 1;      // m
  double lambda = 0.0;
  double rho = 1.0 / 3.0;
};

absl::Status ValidateFailureParams(const FailureParams& p);

// Nearest integer to lambda*N, ties away from zero.
std::uint64_t MaliciousCount(const FailureParams& p);
// floor(rho*n), tolerant of rho*n landing a few ulps below an integer.
std::uint64_t ToleratedCount(const FailureParams& p);

BigInt Binomial(std::uint64_t n, std::uint64_t k);

// Sum_{x = t+1}^{n} C(M, x) C(N-M, n-x) / C(N, n) with M malicious and t
// tolerated, in exact rational arithmetic.
Rational FailureProbabilityExact(const FailureParams& p);
double FailureProbability(const FailureParams& p);

// Union bound over m committees: min(1, m * p_single).
Rational SystemFailureBoundExact(std::uint64_t committees,
                                 const Rational& p_single);
double SystemFailureBound(std::uint64_t committees, double p_single);

struct EnumerationCount {
  std::uint64_t failing = 0;
  std::uint64_t total = 0;

  Rational probability() const {
    return total == 0 ? Rational(0) : Rational(BigInt(failing), BigInt(total));
  }
};

// Exhaustive count over every n-subset of N nodes (nodes 0..M-1 malicious)
// of the subsets holding more than `tolerated` malicious members. N <= 62.
// The parallel policy splits the enumeration by the smallest member.
EnumerationCount CountFailedCommittees(std::uint32_t total_nodes,
                                       std::uint32_t malicious,
                                       std::uint32_t committee_size,
                                       std::uint32_t tolerated,
                                       ExecutionPolicy policy);

}  // namespace thinkey::committee

#endif  // THINKEY_COMMITTEE_SECURITY_H_
