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

#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vna/feature.hpp"
#include "vna/rng.hpp"

using namespace vna;
using namespace vna::feature;

namespace {

FeatureSeq filled(std::size_t t, std::size_t d, std::uint64_t seed) {
  FeatureSeq fs(t, d);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < fs.values.size(); ++i) fs.values[i] = static_cast<float>(0.5 + rng.uniform(i));
  return fs;
}

std::size_t dropped(const FeatureSeq& fs) {
  std::size_t n = 0;
  for (auto m : fs.mask) n += m == 0;
  return n;
}

}  // namespace

TEST_CASE("random drop") {
  const auto fs = filled(10000, 4, 1);
  CHECK(random_drop(fs, 0.0, 3) == fs);
  const auto all = random_drop(fs, 1.0, 3);
  CHECK(dropped(all) == 10000);
  for (float v : all.values) REQUIRE(v == 0.0f);
  const auto some = random_drop(fs, 0.4, 3);
  CHECK(std::abs(static_cast<double>(dropped(some)) - 4000.0) <= 150.0);
  CHECK(random_drop(fs, 0.4, 3) == some);
}

TEST_CASE("structural drop") {
  const auto fs = filled(10, 3, 2);
  CHECK(structural_drop(fs, 0.0, 1) == fs);
  CHECK(dropped(structural_drop(fs, 1.0, 1)) == 10);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto out = structural_drop(fs, 0.3, seed);
    std::size_t first = 10, last = 0;
    for (std::size_t t = 0; t < 10; ++t) {
      if (!out.mask[t]) {
        first = std::min(first, t);
        last = t + 1;
      }
    }
    CHECK(last - first == 3);
    CHECK(dropped(out) == 3);
  }
  CHECK(structural_block_length(0.25, 10) == 3);  // 2.5 rounds up
  CHECK(structural_block_length(0.999, 7) == 7);
  CHECK(structural_block_length(1.0, 7) == 7);
}

TEST_CASE("range-limited drops leave the rest untouched") {
  const auto fs = filled(100, 2, 3);
  const auto out = random_drop(fs, StepRange{20, 40}, 1.0, 1);
  for (std::size_t t = 0; t < 100; ++t) CHECK((out.mask[t] == 0) == (t >= 20 && t < 40));
  const auto s = structural_drop(fs, StepRange{50, 60}, 0.5, 9);
  for (std::size_t t = 0; t < 100; ++t) {
    if (t < 50 || t >= 60) CHECK(s.mask[t] == 1);
  }
  CHECK(dropped(s) == 5);
}

TEST_CASE("container round trip") {
  const auto dir = test::scratch("feature-io");
  auto fs = random_drop(filled(37, 5, 4), 0.3, 2);
  fs.modality = "acoustic";
  fs.provenance = {{"extractor", "synthetic"}};
  save(dir / "a.vfs", fs);
  const auto back = load(dir / "a.vfs");
  CHECK(back == fs);
  const auto bytes = test::slurp(dir / "a.vfs");
  CHECK(bytes.size() == 24 + 37 * 5 * 4 + 37);
  CHECK(bytes.substr(0, 4) == "VNAF");
}
