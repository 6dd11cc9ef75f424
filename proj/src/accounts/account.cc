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

#include "thinkey/accounts/account.h"

#include <limits>

#include "thinkey/common/encoding.h"

namespace thinkey::accounts {

std::vector<std::uint8_t> EncodeAccount(const Account& a) {
  Encoder e;
  e.Str("account");
  e.U64(a.address.value).U64(a.balance).U64(a.nonce);
  e.U64(static_cast<std::uint64_t>(a.code));
  e.ListHeader(a.storage.size());
  for (const auto& [k, v] : a.storage) e.Str(k).Str(v);
  return e.Take();
}

ApplyResult ApplyMessage(const Account& account, const Message& msg) {
  ApplyResult r{account, {}, false};
  auto fault = [&] {
    r.account = account;
    r.emitted.clear();
    r.fault = true;
    if (msg.is_external()) ++r.account.nonce;
    return r;
  };
  if (msg.is_external()) ++r.account.nonce;
  if (account.code == Code::kNone) return r;

  const MessageInput& in = msg.input;
  if (in.kind == kTran) {
    if (in.args.size() != 2) return fault();
    Address payee{in.args[0]};
    std::uint64_t bill = in.args[1];
    if (r.account.balance >= bill) {
      r.account.balance -= bill;
      r.emitted.push_back(MakeRelay(account.address, payee, Add(bill), msg.id, 0));
    }
  } else if (in.kind == kAdd) {
    if (in.args.size() != 1) return fault();
    std::uint64_t bill = in.args[0];
    if (r.account.balance > std::numeric_limits<std::uint64_t>::max() - bill) {
      return fault();
    }
    r.account.balance += bill;
  }
  return r;
}

}  // namespace thinkey::accounts
