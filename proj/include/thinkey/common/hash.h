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

#ifndef THINKEY_COMMON_HASH_H_
#define THINKEY_COMMON_HASH_H_

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace thinkey {

// A 32-byte SHA-256 digest.
struct Hash256 {
  std::array<std::uint8_t, 32> bytes{};

  friend auto operator<=>(const Hash256&, const Hash256&) = default;

  std::string ToHex() const;
  // First eight bytes interpreted big-endian.
  std::uint64_t Prefix64() const;
  bool IsZero() const;

  static absl::StatusOr<Hash256> FromHex(std::string_view hex);
};

Hash256 Sha256(std::span<const std::uint8_t> data);
Hash256 Sha256(std::string_view data);

// Incremental hashing for multi-part inputs.
class Sha256Hasher {
 public:
  Sha256Hasher();
  ~Sha256Hasher();
  Sha256Hasher(const Sha256Hasher&) = delete;
  Sha256Hasher& operator=(const Sha256Hasher&) = delete;

  Sha256Hasher& Update(std::span<const std::uint8_t> data);
  Sha256Hasher& Update(std::string_view data);
  Sha256Hasher& Update(const Hash256& h);
  Sha256Hasher& UpdateU64(std::uint64_t v);
  Hash256 Finish();

 private:
  struct State;
  State* state_;
};

// Maps a hash to a double uniformly distributed in the open interval (0, 1)
// using its top 53 bits.
double HashToUnitInterval(const Hash256& h);

}  // namespace thinkey

template <>
struct std::hash<thinkey::Hash256> {
  std::size_t operator()(const thinkey::Hash256& h) const noexcept {
    return static_cast<std::size_t>(h.Prefix64());
  }
};

#endif  // THINKEY_COMMON_HASH_H_
