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

#ifndef THINKEY_ACCOUNTS_ORDER_GRAPH_H_
#define THINKEY_ACCOUNTS_ORDER_GRAPH_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "thinkey/accounts/account.h"
#include "thinkey/common/hash.h"

namespace thinkey::accounts {

// Directed graph over send/receive events of a block's procedures.
//
// Edges: <send m> -> <recv m> for every message sent and received in the
// block; within each procedure, <recv m_k> -> <send e> for each e emitted by
// step k, and step k's events precede <recv m_{k+1}>. The procedures admit a
// global execution order iff this graph is acyclic.
struct OrderGraph {
  enum class EventKind : std::uint8_t { kSend, kRecv };
  struct Event {
    EventKind kind;
    Hash256 message;
    Address account;
  };

  std::vector<Event> vertices;
  std::vector<std::vector<std::uint32_t>> edges;

  bool HasCycle() const;
};

enum class OrderResult {
  kValid,
  kCycle,
  // A received message is neither a block input nor emitted in the block.
  kUnknownMessage,
  // A message received or emitted twice, or an input also emitted.
  kMalformed,
};

struct OrderVerdict {
  OrderResult result = OrderResult::kValid;
  std::string detail;

  bool ok() const { return result == OrderResult::kValid; }
};

OrderGraph BuildOrderGraph(std::span<const ProcessingProcedure> sigma);

OrderVerdict ValidateOrder(std::span<const ProcessingProcedure> sigma,
                           const std::unordered_set<Hash256>& inputs);

// Renders procedures in the m-label notation, one line per account, e.g.
// "σ_1 = (m1:m4 | m8 | m6:m9)". `label` maps a message id to its name.
std::string FormatSigma(std::span<const ProcessingProcedure> sigma,
                        const std::function<std::string(const Hash256&)>& label);

}  // namespace thinkey::accounts

#endif  // THINKEY_ACCOUNTS_ORDER_GRAPH_H_
