// Copyright 2026 The RedForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REDFORGE_RNG_H_
#define REDFORGE_RNG_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace redforge {

// Counter-based generator (SplitMix64). Output sequences are identical on
// every platform, unlike the std:: distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t Next();

  // Uniform integer in [0, bound). `bound` must be positive.
  uint64_t Below(uint64_t bound);

 private:
  uint64_t state_;
};

// Stable 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);

// Mixes a parent seed with a stream index into an independent child seed.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

template <typename T>
void DeterministicShuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.Below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace redforge

#endif  // REDFORGE_RNG_H_
