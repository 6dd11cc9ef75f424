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

#include "thinkey/chain/merkle.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace thinkey::chain {

namespace {

constexpr std::uint8_t kLeafPrefix = 0x00;
constexpr std::uint8_t kNodePrefix = 0x01;

std::vector<Hash256> NextLayer(const std::vector<Hash256>& layer) {
  std::vector<Hash256> next;
  next.reserve((layer.size() + 1) / 2);
  for (std::size_t i = 0; i < layer.size(); i += 2) {
    const Hash256& left = layer[i];
    const Hash256& right = i + 1 < layer.size() ? layer[i + 1] : layer[i];
    next.push_back(HashNode(left, right));
  }
  return next;
}

}  // namespace

Hash256 EmptyRoot() { return Sha256(std::string_view()); }

Hash256 HashLeaf(std::span<const std::uint8_t> data) {
  Sha256Hasher h;
  h.Update(std::span<const std::uint8_t>(&kLeafPrefix, 1));
  h.Update(data);
  return h.Finish();
}

Hash256 HashNode(const Hash256& left, const Hash256& right) {
  Sha256Hasher h;
  h.Update(std::span<const std::uint8_t>(&kNodePrefix, 1));
  h.Update(left);
  h.Update(right);
  return h.Finish();
}

std::vector<Hash256> HashLeaves(std::span<const Leaf> leaves,
                                ExecutionPolicy policy) {
  std::vector<Hash256> out(leaves.size());
  const std::int64_t n = static_cast<std::int64_t>(leaves.size());
  if (policy == ExecutionPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = HashLeaf(leaves[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) out[i] = HashLeaf(leaves[i]);
  }
  return out;
}

Hash256 RootFromLeafHashes(std::vector<Hash256> layer) {
  if (layer.empty()) return EmptyRoot();
  while (layer.size() > 1) layer = NextLayer(layer);
  return layer.front();
}

Hash256 BuildMerkle(std::span<const Leaf> leaves, ExecutionPolicy policy) {
  return RootFromLeafHashes(HashLeaves(leaves, policy));
}

absl::StatusOr<MerkleProof> ProveFromLeafHashes(std::vector<Hash256> layer,
                                                std::uint64_t index) {
  if (index >= layer.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "leaf index ", index, " out of range for ", layer.size(), " leaves"));
  }
  MerkleProof proof;
  proof.leaf_index = index;
  std::uint64_t pos = index;
  while (layer.size() > 1) {
    if (pos % 2 == 0) {
      const Hash256& sib = pos + 1 < layer.size() ? layer[pos + 1] : layer[pos];
      proof.siblings.push_back({sib, Side::kRight});
    } else {
      proof.siblings.push_back({layer[pos - 1], Side::kLeft});
    }
    layer = NextLayer(layer);
    pos /= 2;
  }
  return proof;
}

absl::StatusOr<MerkleProof> Prove(std::span<const Leaf> leaves,
                                  std::uint64_t index) {
  return ProveFromLeafHashes(HashLeaves(leaves), index);
}

bool Verify(const Hash256& root, std::span<const std::uint8_t> leaf,
            std::uint64_t index, const MerkleProof& proof) {
  if (proof.leaf_index != index) return false;
  if (proof.siblings.size() >= 64) return false;
  Hash256 running = HashLeaf(leaf);
  std::uint64_t pos = index;
  for (const ProofStep& step : proof.siblings) {
    Side expected = pos % 2 == 0 ? Side::kRight : Side::kLeft;
    if (step.side != expected) return false;
    running = step.side == Side::kRight ? HashNode(running, step.sibling)
                                        : HashNode(step.sibling, running);
    pos /= 2;
  }
  // Leftover index bits mean the proof is too short for this position.
  if (pos != 0) return false;
  return running == root;
}

}  // namespace thinkey::chain
