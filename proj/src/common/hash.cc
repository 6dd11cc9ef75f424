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

#include "thinkey/common/hash.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cstring>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace thinkey {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Hash256::ToHex() const {
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::uint64_t Hash256::Prefix64() const {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

bool Hash256::IsZero() const {
  for (std::uint8_t b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

absl::StatusOr<Hash256> Hash256::FromHex(std::string_view hex) {
  if (hex.size() != 64) {
    return absl::InvalidArgumentError(
        absl::StrCat("hash must be 64 hex digits, got ", hex.size()));
  }
  Hash256 h;
  for (int i = 0; i < 32; ++i) {
    int hi = HexValue(hex[2 * i]);
    int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid hex digit in hash: ", std::string(hex)));
    }
    h.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return h;
}

Hash256 Sha256(std::span<const std::uint8_t> data) {
  Hash256 h;
  SHA256(data.data(), data.size(), h.bytes.data());
  return h;
}

Hash256 Sha256(std::string_view data) {
  return Sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

struct Sha256Hasher::State {
  EVP_MD_CTX* ctx;
};

Sha256Hasher::Sha256Hasher() : state_(new State{EVP_MD_CTX_new()}) {
  EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr);
}

Sha256Hasher::~Sha256Hasher() {
  EVP_MD_CTX_free(state_->ctx);
  delete state_;
}

Sha256Hasher& Sha256Hasher::Update(std::span<const std::uint8_t> data) {
  EVP_DigestUpdate(state_->ctx, data.data(), data.size());
  return *this;
}

Sha256Hasher& Sha256Hasher::Update(std::string_view data) {
  EVP_DigestUpdate(state_->ctx, data.data(), data.size());
  return *this;
}

Sha256Hasher& Sha256Hasher::Update(const Hash256& h) {
  EVP_DigestUpdate(state_->ctx, h.bytes.data(), h.bytes.size());
  return *this;
}

Sha256Hasher& Sha256Hasher::UpdateU64(std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 7; i >= 0; --i) {
    buf[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  EVP_DigestUpdate(state_->ctx, buf, sizeof(buf));
  return *this;
}

Hash256 Sha256Hasher::Finish() {
  Hash256 h;
  unsigned int len = 0;
  EVP_DigestFinal_ex(state_->ctx, h.bytes.data(), &len);
  return h;
}

double HashToUnitInterval(const Hash256& h) {
  std::uint64_t top = h.Prefix64() >> 11;  // 53 bits
  return (static_cast<double>(top) + 0.5) * 0x1.0p-53;
}

}  // namespace thinkey
