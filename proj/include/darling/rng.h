// Copyright 2026 The Darling Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DARLING_RNG_H_
#define DARLING_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace darling {

using Rng = std::mt19937_64;

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t Fnv1a(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named sub-stream of a root seed. A stream's seed depends only on
// (root, name), so adding a new consumer never perturbs existing ones.
inline uint64_t DeriveSeed(uint64_t root, std::string_view stream) {
  return SplitMix64(root ^ SplitMix64(Fnv1a(stream)));
}

inline Rng MakeRng(uint64_t root, std::string_view stream) {
  return Rng(DeriveSeed(root, stream));
}

// Uniform index in [0, n). Lemire-free modulo is fine here: n is tiny
// relative to 2^64, so the bias is below 1e-15.
inline uint64_t UniformIndex(Rng& rng, uint64_t n) { return rng() % n; }

// Uniform real in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace darling

#endif  // DARLING_RNG_H_
