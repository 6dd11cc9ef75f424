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

#ifndef THINKEY_COMMON_ENCODING_H_
#define THINKEY_COMMON_ENCODING_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "thinkey/common/hash.h"

namespace thinkey {

// Canonical byte encoder. Every field is written as a 4-byte big-endian
// length followed by the field bytes; integers are 8-byte big-endian. The
// layout is normative and documented in docs/encoding.md.
class Encoder {
 public:
  Encoder& U64(std::uint64_t v);
  Encoder& I64(std::int64_t v) { return U64(static_cast<std::uint64_t>(v)); }
  Encoder& Bytes(std::span<const std::uint8_t> data);
  Encoder& Str(std::string_view s);
  Encoder& HashField(const Hash256& h) { return Bytes(h.bytes); }
  // Begins a list: writes the element count as a U64 field.
  Encoder& ListHeader(std::size_t count) { return U64(count); }

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  std::vector<std::uint8_t> Take() { return std::move(buf_); }
  Hash256 Digest() const { return Sha256(buf_); }

 private:
  void Length(std::size_t n);

  std::vector<std::uint8_t> buf_;
};

}  // namespace thinkey

#endif  // THINKEY_COMMON_ENCODING_H_
