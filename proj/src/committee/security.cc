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

#include <bit>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace thinkey::committee {

absl::Status ValidateFailureParams(const FailureParams& p) {
  if (p.total_nodes == 0) return absl::InvalidArgumentError("N must be positive");
  if (p.committee_size == 0 || p.committee_size > p.total_nodes) {
    return absl::InvalidArgumentError(absl::StrCat(
        "committee size ", p.committee_size, " must be in [1, N=",
        p.total_nodes, "]"));
  }
  if (!(p.lambda >= 0.0 && p.lambda < 1.0)) {
    return absl::InvalidArgumentError("lambda must be in [0, 1)");
  }
  if (!(p.rho > 0.0 && p.rho < 1.0)) {
    return absl::InvalidArgumentError("rho must be in (0, 1)");
  }
  return absl::OkStatus();
}

std::uint64_t MaliciousCount(const FailureParams& p) {
  return static_cast<std::uint64_t>(
      std::llround(p.lambda * static_cast<double>(p.total_nodes)));
}

std::uint64_t ToleratedCount(const FailureParams& p) {
  return static_cast<std::uint64_t>(
      std::floor(p.rho * static_cast<double>(p.committee_size) + 1e-9));
}

BigInt Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational FailureProbabilityExact(const FailureParams& p) {
  const std::uint64_t N = p.total_nodes;
  const std::uint64_t n = p.committee_size;
  const std::uint64_t bad = MaliciousCount(p);
  const std::uint64_t good = N - bad;
  const std::uint64_t t = ToleratedCount(p);
  if (bad == 0 || t >= n) return 0;

  BigInt numerator = 0;
  for (std::uint64_t x = t + 1; x <= n && x <= bad; ++x) {
    if (n - x > good) continue;
    numerator += Binomial(bad, x) * Binomial(good, n - x);
  }
  return Rational(numerator, Binomial(N, n));
}

double FailureProbability(const FailureParams& p) {
  return FailureProbabilityExact(p).convert_to<double>();
}

Rational SystemFailureBoundExact(std::uint64_t committees,
                                 const Rational& p_single) {
  Rational bound = p_single * committees;
  return bound > 1 ? Rational(1) : bound;
}

double SystemFailureBound(std::uint64_t committees, double p_single) {
  double bound = static_cast<double>(committees) * p_single;
  return bound > 1.0 ? 1.0 : bound;
}

namespace {

// Counts n-subsets of the positions [lo, N) (as a bitmask universe) with
// more than `tolerated` malicious members after adding `fixed_bad` from
// already-chosen members. Gosper's hack walks subsets in increasing order.
void CountRange(std::uint32_t lo, std::uint32_t N, std::uint32_t k,
                std::uint64_t malicious_mask, std::uint32_t fixed_bad,
                std::uint32_t tolerated, EnumerationCount& acc) {
  const std::uint32_t width = N - lo;
  if (k > width) return;
  if (k == 0) {
    ++acc.total;
    if (fixed_bad > tolerated) ++acc.failing;
    return;
  }
  const std::uint64_t shifted_mask = malicious_mask >> lo;
  std::uint64_t s = (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = std::uint64_t{1} << width;
  while (s < limit) {
    ++acc.total;
    if (fixed_bad + std::popcount(s & shifted_mask) > tolerated) ++acc.failing;
    std::uint64_t c = s & (~s + 1);
    std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

}  // namespace

EnumerationCount CountFailedCommittees(std::uint32_t total_nodes,
                                       std::uint32_t malicious,
                                       std::uint32_t committee_size,
                                       std::uint32_t tolerated,
                                       ExecutionPolicy policy) {
  EnumerationCount result;
  if (committee_size > total_nodes || total_nodes > 62) return result;
  const std::uint64_t mask =
      malicious >= 64 ? ~std::uint64_t{0}
                      : (std::uint64_t{1} << malicious) - 1;
  if (policy == ExecutionPolicy::kSerial || committee_size == 0) {
    CountRange(0, total_nodes, committee_size, mask, 0, tolerated, result);
    return result;
  }
  // Split by the smallest member i: the remaining n-1 members come from
  // (i, N).
  std::uint64_t failing = 0;
  std::uint64_t total = 0;
  const std::int64_t firsts = total_nodes;
#pragma omp parallel for schedule(dynamic) reduction(+ : failing, total)
  for (std::int64_t i = 0; i < firsts; ++i) {
    EnumerationCount local;
    std::uint32_t bad = i < static_cast<std::int64_t>(malicious) ? 1 : 0;
    CountRange(static_cast<std::uint32_t>(i + 1), total_nodes,
               committee_size - 1, mask, bad, tolerated, local);
    failing += local.failing;
    total += local.total;
  }
  result.failing = failing;
  result.total = total;
  return result;
}

}  // namespace thinkey::committee
