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

#ifndef THINKEY_TESTS_TESTING_FIXTURES_H_
#define THINKEY_TESTS_TESTING_FIXTURES_H_

#include <cstdint>
#include <vector>

#include "thinkey/accounts/account.h"
#include "thinkey/accounts/message.h"
#include "thinkey/chain/block.h"
#include "thinkey/common/types.h"

namespace thinkey::fixtures {

// The `skip`-th address (counting from `start`) that maps to `chain`.
inline Address AddressOnChain(ChainId chain, std::uint32_t chain_count,
                              std::uint64_t start = 1, int skip = 0) {
  for (std::uint64_t v = start;; ++v) {
    if (accounts::ChainOf(Address{v}, chain_count) == chain && skip-- == 0) {
      return Address{v};
    }
  }
}

inline accounts::Account Funded(Address a, std::uint64_t balance) {
  accounts::Account acct = accounts::NewAccount(a);
  acct.balance = balance;
  return acct;
}

inline chain::AccountMap Accounts(
    std::initializer_list<std::pair<Address, std::uint64_t>> entries) {
  chain::AccountMap out;
  for (const auto& [a, b] : entries) out.emplace(a, Funded(a, b));
  return out;
}

// External payment: `payer` pays `bill` to `payee`.
inline accounts::Message Pay(Address payer, Address payee, std::uint64_t nonce,
                             std::uint64_t bill) {
  return accounts::MakeExternal(payer, payer, nonce,
                                accounts::Tran(payee, bill));
}

}  // namespace thinkey::fixtures

#endif  // THINKEY_TESTS_TESTING_FIXTURES_H_
