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

#ifndef THINKEY_COMMON_RANDOM_H_
#define THINKEY_COMMON_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace thinkey {

// Seeded generator with distribution code written out here rather than
// taken from <random>, whose distributions are implementation-defined. Runs
// must be bit-identical across standard libraries.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t Uniform(std::uint64_t bound);

  // Uniform double in [0, 1).
  double UnitDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double UniformReal(double lo, double hi) {
    return lo + (hi - lo) * UnitDouble();
  }

  bool Bernoulli(double p) { return UnitDouble() < p; }

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Uniform(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent keyed draws from a seed
// and a tuple of identifiers without threading generator state around.
std::uint64_t Mix64(std::uint64_t x);
std::uint64_t MixKey(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);
// Uniform double in [0, 1) from a keyed draw.
double KeyedUnit(std::uint64_t seed, std::initializer_list<std::uint64_t> parts);

}  // namespace thinkey

#endif  // THINKEY_COMMON_RANDOM_H_
