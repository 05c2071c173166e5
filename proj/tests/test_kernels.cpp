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

// The OpenMP kernels must be byte-identical to the serial reference for every
// thread count.

#include <omp.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "vna/kernels.hpp"
#include "vna/rng.hpp"
#include "vna/video.hpp"

using namespace vna;
namespace k = vna::kernels;

namespace {

Frame noise_frame(int w, int h, std::uint64_t seed) {
  Frame f(w, h);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(rng.bits(i));
  return f;
}

const int kSizes[][2] = {{1, 1}, {2, 3}, {17, 9}, {64, 48}, {161, 121}};

}  // namespace

TEST_CASE("reflect index") {
  CHECK(k::reflect_index(-1, 5) == 1);
  CHECK(k::reflect_index(-2, 5) == 2);
  CHECK(k::reflect_index(5, 5) == 3);
  CHECK(k::reflect_index(6, 5) == 2);
  CHECK(k::reflect_index(-7, 5) == 1);
  CHECK(k::reflect_index(3, 1) == 0);
}

TEST_CASE("store_u8 rounds half up and clamps") {
  CHECK(k::store_u8(0.49f) == 0);
  CHECK(k::store_u8(0.5f) == 1);
  CHECK(k::store_u8(254.5f) == 255);
  CHECK(k::store_u8(-3.0f) == 0);
  CHECK(k::store_u8(1e9f) == 255);
  CHECK(k::store_u8(std::nanf("")) == 0);
}

TEST_CASE("serial and parallel kernels agree byte for byte") {
  for (int threads : {1, 2, 3, 7}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    for (const auto& sz : kSizes) {
      CAPTURE(sz[0]);
      CAPTURE(sz[1]);
      const Frame src = noise_frame(sz[0], sz[1], 99);
      for (double sigma : {0.5, 2.0, 5.0}) {
        const auto taps = video::gaussian_taps(sigma);
        Frame a(sz[0], sz[1]), b(sz[0], sz[1]);
        k::serial::convolve_separable(src, a, taps);
        k::parallel::convolve_separable(src, b, taps);
        CHECK(a == b);
      }
      {
        Frame a = src, b = src;
        k::serial::add_gaussian(a, 5, 25.5);
        k::parallel::add_gaussian(b, 5, 25.5);
        CHECK(a == b);
      }
      {
        Frame a = src, b = src;
        k::serial::salt_pepper(a, 6, 0.1);
        k::parallel::salt_pepper(b, 6, 0.1);
        CHECK(a == b);
      }
      {
        k::Lut lut{};
        for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(255 - v);
        Frame a = src, b = src;
        k::serial::apply_lut(a, lut);
        k::parallel::apply_lut(b, lut);
        CHECK(a == b);
      }
      for (float f : {0.0f, 0.5f, 1.7f}) {
        Frame a = src, b = src;
        k::serial::saturate(a, f);
        k::parallel::saturate(b, f);
        CHECK(a == b);
      }
      {
        Frame a = src, b = src;
        k::serial::permute_channels(a, {2, 0, 1});
        k::parallel::permute_channels(b, {2, 0, 1});
        CHECK(a == b);
      }
      {
        Frame a = src, b = src;
        k::serial::fill_rect(a, sz[0] / 3, sz[1] / 3, (sz[0] + 1) / 2, (sz[1] + 1) / 2);
        k::parallel::fill_rect(b, sz[0] / 3, sz[1] / 3, (sz[0] + 1) / 2, (sz[1] + 1) / 2);
        CHECK(a == b);
      }
    }
    std::vector<float> x(5000), h(301);
    const CounterRng rng(3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(rng.normal(i));
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = static_cast<float>(rng.normal(10000 + i));
    std::vector<float> ya(5300), yb(5300);
    k::serial::convolve_direct(x, h, ya);
    k::parallel::convolve_direct(x, h, yb);
    CHECK(std::memcmp(ya.data(), yb.data(), ya.size() * sizeof(float)) == 0);
  }
  omp_set_num_threads(1);
}

TEST_CASE("direct convolution matches the textbook sum") {
  const std::vector<float> x = {1, 2, 3};
  const std::vector<float> h = {1, -1};
  std::vector<float> y(5, 42.0f);
  k::serial::convolve_direct(x, h, y);
  CHECK(y == std::vector<float>{1, 1, 1, -3, 0});
}
