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

#ifndef THINKEY_ACCOUNTS_ACCOUNT_H_
#define THINKEY_ACCOUNTS_ACCOUNT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "thinkey/accounts/message.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/types.h"

namespace thinkey::accounts {

// Method table attached to an account. Every account shares the built-in
// payment methods; kNone accepts every message as a no-op.
enum class Code : std::uint8_t { kPayment = 0, kNone = 1 };

struct Account {
  Address address;
  std::uint64_t balance = 0;
  // Number of external messages accepted from this address.
  std::uint64_t nonce = 0;
  Code code = Code::kPayment;
  std::map<std::string, std::string> storage;

  bool operator==(const Account&) const = default;
};

// A fresh payment account with zero balance and nonce.
inline Account NewAccount(Address address) {
  Account a;
  a.address = address;
  return a;
}


std::vector<std::uint8_t> EncodeAccount(const Account& a);

// One entry of a processing procedure: the message received and the
// messages its execution emitted, in emission order.
struct ProcedureStep {
  Hash256 received;
  std::vector<Hash256> emitted;
  // Set when execution faulted; the message was consumed without effect.
  bool fault = false;

  bool operator==(const ProcedureStep&) const = default;
};

// Per-account record of the order in which messages were processed in a
// block, e.g. (m1:m4 | m8 | m6:m9).
struct ProcessingProcedure {
  Address account;
  std::vector<ProcedureStep> steps;

  bool operator==(const ProcessingProcedure&) const = default;
};

struct ApplyResult {
  Account account;
  std::vector<Message> emitted;
  bool fault = false;
};

// Runs the account's method for msg.input.kind. Unknown kinds are a no-op.
// A fault (malformed arguments, balance overflow) leaves the account
// unchanged and emits nothing. External messages advance the nonce.
ApplyResult ApplyMessage(const Account& account, const Message& msg);

}  // namespace thinkey::accounts

#endif  // THINKEY_ACCOUNTS_ACCOUNT_H_
