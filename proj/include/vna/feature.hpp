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

// Feature-sequence erasure.
//
// On-disk container (.vfs), all integers little-endian:
//   offset 0   char[4]   magic "VNAF"
//   offset 4   uint32    version (1)
//   offset 8   uint64    T, timesteps
//   offset 16  uint64    D, dimensions
//   offset 24  float32   values, T*D row-major
//   then       uint8     mask, T bytes (1 = valid)
// A JSON sidecar "<file>.json" carries {"modality", "steps", "dims",
// "provenance"}.

#ifndef VNA_FEATURE_HPP
#define VNA_FEATURE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vna/config.hpp"

namespace vna::feature {

struct FeatureSeq {
  std::size_t steps = 0;
  std::size_t dims = 0;
  std::vector<float> values;
  std::vector<std::uint8_t> mask;
  std::string modality;
  nlohmann::json provenance;

  FeatureSeq() = default;
  FeatureSeq(std::size_t t, std::size_t d, std::string mod = "feature")
      : steps(t), dims(d), values(t * d, 0.0f), mask(t, 1), modality(std::move(mod)) {}

  std::span<float> row(std::size_t t) { return {values.data() + t * dims, dims}; }
  std::span<const float> row(std::size_t t) const { return {values.data() + t * dims, dims}; }

  bool operator==(const FeatureSeq&) const = default;
};

struct StepRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Block length used by structural_drop: round-half-up(rate * steps), and
/// all steps when rate == 1.
std::size_t structural_block_length(double missing_rate, std::size_t steps);

/// Each valid timestep in range is zeroed (whole vector, mask cleared) with
/// probability missing_rate. Draws are keyed by absolute timestep.
FeatureSeq random_drop(const FeatureSeq& fs, double missing_rate, std::uint64_t seed);
FeatureSeq random_drop(const FeatureSeq& fs, StepRange range, double missing_rate, std::uint64_t seed);

/// Zeroes one contiguous block of structural_block_length(rate, n) steps at a
/// uniformly drawn start.
FeatureSeq structural_drop(const FeatureSeq& fs, double missing_rate, std::uint64_t seed);
FeatureSeq structural_drop(const FeatureSeq& fs, StepRange range, double missing_rate,
                           std::uint64_t seed);

FeatureSeq apply_item(const FeatureSeq& fs, const NoiseItem& item, std::uint64_t item_seed);

void save(const std::filesystem::path& path, const FeatureSeq& fs);
FeatureSeq load(const std::filesystem::path& path);

}  // namespace vna::feature

#endif  // VNA_FEATURE_HPP
