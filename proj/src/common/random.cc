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

#include "thinkey/common/random.h"

namespace thinkey {

std::uint64_t DeterministicRng::Uniform(std::uint64_t bound) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t MixKey(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = Mix64(seed);
  for (std::uint64_t p : parts) h = Mix64(h ^ Mix64(p));
  return h;
}

double KeyedUnit(std::uint64_t seed,
                 std::initializer_list<std::uint64_t> parts) {
  return static_cast<double>(MixKey(seed, parts) >> 11) * 0x1.0p-53;
}

}  // namespace thinkey
