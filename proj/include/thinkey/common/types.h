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

#ifndef THINKEY_COMMON_TYPES_H_
#define THINKEY_COMMON_TYPES_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

namespace thinkey {

// Simulated milliseconds. Fractional values carry transmission and
// processing costs below one millisecond.
using SimTime = double;

using NodeId = std::uint32_t;
using ChainId = std::uint32_t;

// The root chain is addressed with a reserved chain id so that transaction
// chains can be numbered densely from zero.
inline constexpr ChainId kRootChain = std::numeric_limits<ChainId>::max();

// Account address. Strong type so that addresses cannot be confused with
// node identifiers or balances.
struct Address {
  std::uint64_t value = 0;

  friend auto operator<=>(const Address&, const Address&) = default;
};

// Parallel kernels take an explicit policy so that tests can pin the serial
// reference and compare it against the OpenMP variant.
enum class ExecutionPolicy { kSerial, kParallel };

}  // namespace thinkey

template <>
struct std::hash<thinkey::Address> {
  std::size_t operator()(const thinkey::Address& a) const noexcept {
    return std::hash<std::uint64_t>{}(a.value);
  }
};

#endif  // THINKEY_COMMON_TYPES_H_
