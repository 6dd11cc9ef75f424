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

#include "thinkey/accounts/message.h"

namespace thinkey::accounts {

std::vector<std::uint8_t> EncodeContent(const Message& m) {
  Encoder e;
  e.Str("msg");
  e.U64(m.from.value).U64(m.to.value);
  e.U64(m.nonce.has_value() ? 1 : 0).U64(m.nonce.value_or(0));
  e.Str(m.input.kind);
  e.ListHeader(m.input.args.size());
  for (std::uint64_t a : m.input.args) e.U64(a);
  e.HashField(m.cause).U64(m.emission_index);
  return e.Take();
}

Hash256 ComputeId(const Message& m) { return Sha256(EncodeContent(m)); }

Message Finalize(Message m) {
  m.id = ComputeId(m);
  return m;
}

Message MakeExternal(Address from, Address to, std::uint64_t nonce,
                     MessageInput input) {
  Message m;
  m.from = from;
  m.to = to;
  m.nonce = nonce;
  m.input = std::move(input);
  m = Finalize(std::move(m));
  m.verification = Sign(m);
  return m;
}

Message MakeRelay(Address from, Address to, MessageInput input,
                  const Hash256& cause, std::uint32_t emission_index) {
  Message m;
  m.from = from;
  m.to = to;
  m.input = std::move(input);
  m.cause = cause;
  m.emission_index = emission_index;
  return Finalize(std::move(m));
}

MessageInput Tran(Address payee, std::uint64_t bill) {
  return MessageInput{kTran, {payee.value, bill}};
}

MessageInput Add(std::uint64_t bill) { return MessageInput{kAdd, {bill}}; }

std::uint64_t CarriedValue(const Message& m) {
  if (m.input.kind == kAdd && m.input.args.size() == 1) return m.input.args[0];
  return 0;
}

Hash256 AccountKey(Address a) {
  return Sha256Hasher().Update("thinkey-account-key").UpdateU64(a.value).Finish();
}

Signature Sign(const Message& m) {
  return Signature{
      Sha256Hasher().Update(AccountKey(m.from)).Update(m.id).Finish()};
}

bool VerifySignature(const Message& m) {
  const auto* sig = std::get_if<Signature>(&m.verification);
  if (sig == nullptr) return false;
  if (ComputeId(m) != m.id) return false;
  return Sign(m) == *sig;
}

ChainId ChainOf(Address a, std::uint32_t chain_count) {
  if (chain_count <= 1) return 0;
  Hash256 h = Sha256Hasher().Update("thinkey-chain-of").UpdateU64(a.value).Finish();
  return static_cast<ChainId>(h.Prefix64() % chain_count);
}

}  // namespace thinkey::accounts
