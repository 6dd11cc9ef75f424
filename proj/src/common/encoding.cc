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

#include "thinkey/common/encoding.h"

namespace thinkey {

void Encoder::Length(std::size_t n) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    buf_.push_back(static_cast<std::uint8_t>((n >> shift) & 0xff));
  }
}

Encoder& Encoder::U64(std::uint64_t v) {
  Length(8);
  for (int shift = 56; shift >= 0; shift -= 8) {
    buf_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
  return *this;
}

Encoder& Encoder::Bytes(std::span<const std::uint8_t> data) {
  Length(data.size());
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

Encoder& Encoder::Str(std::string_view s) {
  Length(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
  return *this;
}

}  // namespace thinkey
