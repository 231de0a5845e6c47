// Copyright 2026 The cpesdp Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cpesdp {

// Seeds are plain 64-bit integers. Every random stream in the library is
// derived from a caller-owned seed so that runs are reproducible.
using Seed = std::uint64_t;

namespace internal {

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t Fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace internal

// Stable sub-seed for (seed, label). Independent of call order, so sibling
// streams (per edge, per purpose) do not depend on traversal order.
constexpr Seed DeriveSeed(Seed seed, std::string_view label) {
  return internal::SplitMix64(internal::Fnv1a64(label) ^
                              internal::SplitMix64(seed));
}

constexpr Seed DeriveSeed(Seed seed, std::string_view label,
                          std::uint64_t index) {
  return internal::SplitMix64(DeriveSeed(seed, label) + index);
}

// Thin wrapper over mt19937_64. The uniform mapping is done by hand so the
// stream is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  // Exponential with the given rate (> 0).
  double Exponential(double rate) { return -std::log(UniformOpen()) / rate; }

  double StandardNormal() {
    // Box-Muller; the second variate is discarded to keep the stream simple.
    const double u1 = UniformOpen();
    const double u2 = UniformOpen();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t NextBits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cpesdp
