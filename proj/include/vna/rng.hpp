// Copyright 2026 The vna Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VNA_RNG_HPP
#define VNA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace vna {

/// Identifier written into config files next to the seed. Bump the suffix
/// whenever any draw below changes.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-ctr/1";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) noexcept { return seed; }

/// Folds any number of tags into a child seed.
template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    Tags... rest) noexcept {
  return derive_seed(splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL)),
                     static_cast<std::uint64_t>(rest)...);
}

/// FNV-1a, used to turn string ids into seed tags.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: draw `i` depends only on (key, i), so any
/// partition of the index space across threads yields the same values as a
/// serial pass.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t n) const noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits(counter)) * n) >> 64);
  }

  /// Standard normal via Box-Muller on draws (2c, 2c+1).
  double normal(std::uint64_t counter) const noexcept {
    const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

/// Sequential convenience wrapper for code paths that consume a handful of
/// draws in a fixed order (layout generation, block placement).
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t key) noexcept : rng_(key) {}

  double uniform() noexcept { return rng_.uniform(next_++); }
  std::uint64_t below(std::uint64_t n) noexcept { return rng_.below(next_++, n); }
  double normal() noexcept {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace vna

#endif  // VNA_RNG_HPP
