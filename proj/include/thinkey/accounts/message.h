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

#ifndef THINKEY_ACCOUNTS_MESSAGE_H_
#define THINKEY_ACCOUNTS_MESSAGE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thinkey/chain/merkle.h"
#include "thinkey/common/encoding.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/types.h"

namespace thinkey::accounts {

// Method names of the built-in payment code.
inline constexpr char kTran[] = "tran";
inline constexpr char kAdd[] = "add";

// The input tuple of a message: a method name and integer arguments.
// {:tran, B, 10} is {"tran", {B, 10}}; {:add, 10} is {"add", {10}}.
struct MessageInput {
  std::string kind;
  std::vector<std::uint64_t> args;

  bool operator==(const MessageInput&) const = default;
};

// Keyed-hash authentication tag standing in for an account signature.
struct Signature {
  Hash256 tag;

  bool operator==(const Signature&) const = default;
};

// Where a cross-chain relay message was recorded, plus its inclusion proof
// against the outer-relay root of that block.
struct RelayProofRef {
  ChainId origin_chain = 0;
  std::uint64_t origin_height = 0;
  std::uint64_t leaf_index = 0;
  chain::MerkleProof proof;

  bool operator==(const RelayProofRef&) const = default;
};

// Inter-relay messages travel inside the block that emitted them (or the
// chain's own carry-over queue) and need no separate verification data.
using Verification = std::variant<std::monostate, Signature, RelayProofRef>;

struct Message {
  Address from;
  Address to;
  // Set for external messages; relay messages have no nonce.
  std::optional<std::uint64_t> nonce;
  MessageInput input;
  // Relay messages only: id of the message whose execution emitted this
  // one and the emission position. Distinguishes repeated identical sends.
  Hash256 cause;
  std::uint32_t emission_index = 0;
  Verification verification;
  // Content hash over every field except `verification`.
  Hash256 id;

  bool is_external() const { return nonce.has_value(); }
  bool is_relay() const { return !nonce.has_value(); }
};

// Canonical content encoding (used for ids and Merkle leaves).
std::vector<std::uint8_t> EncodeContent(const Message& m);
Hash256 ComputeId(const Message& m);

// Fills in `id` from the content.
Message Finalize(Message m);

Message MakeExternal(Address from, Address to, std::uint64_t nonce,
                     MessageInput input);
Message MakeRelay(Address from, Address to, MessageInput input,
                  const Hash256& cause, std::uint32_t emission_index);

MessageInput Tran(Address payee, std::uint64_t bill);
MessageInput Add(std::uint64_t bill);

// Value carried by a message for conservation accounting: the amount of an
// :add, zero otherwise.
std::uint64_t CarriedValue(const Message& m);

// Simulation-grade signatures: each account key is derived from its address,
// and a signature is H(key || message id).
Hash256 AccountKey(Address a);
Signature Sign(const Message& m);
bool VerifySignature(const Message& m);

// Chain assignment: chain_id = H(address) mod chain_count.
ChainId ChainOf(Address a, std::uint32_t chain_count);

}  // namespace thinkey::accounts

#endif  // THINKEY_ACCOUNTS_MESSAGE_H_
