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

#ifndef THINKEY_CHAIN_MERKLE_H_
#define THINKEY_CHAIN_MERKLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "thinkey/common/hash.h"
#include "thinkey/common/types.h"

namespace thinkey::chain {

// Merkle tree over SHA-256 with one-byte domain separation:
//   leaf  = H(0x00 || data)
//   node  = H(0x01 || left || right)
// A layer of odd width duplicates its last node. The empty tree has root
// H("") so that every block carries a well-defined root.

using Leaf = std::vector<std::uint8_t>;

enum class Side : std::uint8_t { kLeft = 0, kRight = 1 };

struct ProofStep {
  Hash256 sibling;
  // Position of the sibling relative to the running hash.
  Side side = Side::kRight;

  bool operator==(const ProofStep&) const = default;
};

struct MerkleProof {
  std::uint64_t leaf_index = 0;
  std::vector<ProofStep> siblings;

  bool operator==(const MerkleProof&) const = default;
};

Hash256 EmptyRoot();
Hash256 HashLeaf(std::span<const std::uint8_t> data);
Hash256 HashNode(const Hash256& left, const Hash256& right);

// Leaf hashing kernel. Both policies produce identical output.
std::vector<Hash256> HashLeaves(std::span<const Leaf> leaves,
                                ExecutionPolicy policy = ExecutionPolicy::kSerial);

Hash256 RootFromLeafHashes(std::vector<Hash256> layer);

Hash256 BuildMerkle(std::span<const Leaf> leaves,
                    ExecutionPolicy policy = ExecutionPolicy::kSerial);

absl::StatusOr<MerkleProof> Prove(std::span<const Leaf> leaves,
                                  std::uint64_t index);
absl::StatusOr<MerkleProof> ProveFromLeafHashes(std::vector<Hash256> layer,
                                                std::uint64_t index);

// True iff the path from `leaf` through `proof` hashes to `root` and the
// sibling sides agree with `index`. Malformed proofs yield false.
bool Verify(const Hash256& root, std::span<const std::uint8_t> leaf,
            std::uint64_t index, const MerkleProof& proof);

}  // namespace thinkey::chain

#endif  // THINKEY_CHAIN_MERKLE_H_
