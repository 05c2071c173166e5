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

// OpenMP kernels. Accumulation order per output element matches the serial
// reference exactly; only the iteration over independent outputs is split.

#include <omp.h>

#include <algorithm>
#include <vector>

#include "vna/kernels.hpp"
#include "vna/rng.hpp"

namespace vna::kernels {

int parallel_threads() noexcept { return omp_get_max_threads(); }

namespace parallel {

namespace {

std::vector<int> border_table(int n, int radius) {
  std::vector<int> table(static_cast<std::size_t>(n + 2 * radius));
  for (int i = -radius; i < n + radius; ++i) table[i + radius] = reflect_index(i, n);
  return table;
}

}  // namespace

void convolve_separable(const Frame& in, Frame& out, std::span<const float> taps) {
  const int w = in.width, h = in.height;
  const int radius = static_cast<int>(taps.size() / 2);
  const int ntaps = static_cast<int>(taps.size());
  const auto xs = border_table(w, radius);
  const auto ys = border_table(h, radius);
  const std::size_t row = static_cast<std::size_t>(w) * 3;
  std::vector<float> tmp(Frame::byte_size(w, h));
  const std::uint8_t* src = in.pixels.data();

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* srow = src + y * row;
    float* trow = tmp.data() + y * row;
    for (int x = 0; x < w; ++x) {
      float acc[3] = {0.0f, 0.0f, 0.0f};
      for (int k = 0; k < ntaps; ++k) {
        const std::uint8_t* px = srow + static_cast<std::size_t>(xs[x + k]) * 3;
        acc[0] += taps[k] * static_cast<float>(px[0]);
        acc[1] += taps[k] * static_cast<float>(px[1]);
        acc[2] += taps[k] * static_cast<float>(px[2]);
      }
      trow[3 * x] = acc[0];
      trow[3 * x + 1] = acc[1];
      trow[3 * x + 2] = acc[2];
    }
  }

  out = Frame(w, h);
  std::uint8_t* dst = out.pixels.data();
#pragma omp parallel
  {
    std::vector<float> acc(row);
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (int k = 0; k < ntaps; ++k) {
        const float* trow = tmp.data() + static_cast<std::size_t>(ys[y + k]) * row;
        const float tap = taps[k];
        for (std::size_t i = 0; i < row; ++i) acc[i] += tap * trow[i];
      }
      std::uint8_t* drow = dst + y * row;
      for (std::size_t i = 0; i < row; ++i) drow[i] = store_u8(acc[i]);
    }
  }
}

void add_gaussian(Frame& frame, std::uint64_t key, double sigma) {
  const CounterRng rng(key);
  const auto n = static_cast<std::int64_t>(frame.pixels.size());
  std::uint8_t* data = frame.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    const double v = data[i] + sigma * rng.normal(u);
    data[i] = store_u8(static_cast<float>(v));
  }
}

void salt_pepper(Frame& frame, std::uint64_t key, double p) {
  const CounterRng rng(key);
  const auto n = static_cast<std::int64_t>(frame.pixel_count());
  std::uint8_t* data = frame.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::uint64_t>(i);
    if (rng.uniform(2 * u) < p) {
      const std::uint8_t v = rng.uniform(2 * u + 1) < 0.5 ? 0 : 255;
      data[3 * i] = data[3 * i + 1] = data[3 * i + 2] = v;
    }
  }
}

void apply_lut(Frame& frame, const Lut& lut) {
  const auto n = static_cast<std::int64_t>(frame.pixels.size());
  std::uint8_t* data = frame.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) data[i] = lut[data[i]];
}

void saturate(Frame& frame, float factor) {
  const auto n = static_cast<std::int64_t>(frame.pixel_count());
  std::uint8_t* data = frame.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    std::uint8_t* px = data + 3 * i;
    const float luma = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
    const float r = luma + factor * (static_cast<float>(px[0]) - luma);
    const float g = luma + factor * (static_cast<float>(px[1]) - luma);
    const float b = luma + factor * (static_cast<float>(px[2]) - luma);
    px[0] = store_u8(r);
    px[1] = store_u8(g);
    px[2] = store_u8(b);
  }
}

void permute_channels(Frame& frame, std::array<int, 3> order) {
  const auto n = static_cast<std::int64_t>(frame.pixel_count());
  std::uint8_t* data = frame.pixels.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    std::uint8_t* px = data + 3 * i;
    const std::uint8_t src[3] = {px[0], px[1], px[2]};
    px[0] = src[order[0]];
    px[1] = src[order[1]];
    px[2] = src[order[2]];
  }
}

void fill_rect(Frame& frame, int x0, int y0, int w, int h) {
#pragma omp parallel for schedule(static)
  for (int y = y0; y < y0 + h; ++y) {
    std::fill_n(frame.at(x0, y), static_cast<std::size_t>(w) * 3, std::uint8_t{0});
  }
}

void convolve_direct(std::span<const float> x, std::span<const float> h, std::span<float> y) {
  const auto n_out = static_cast<std::int64_t>(y.size());
  const auto n_in = static_cast<std::int64_t>(x.size());
  const auto n_taps = static_cast<std::int64_t>(h.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t n = 0; n < n_out; ++n) {
    double acc = 0.0;
    const std::int64_t k_end = std::min(n_taps - 1, n);
    for (std::int64_t k = 0; k <= k_end; ++k) {
      if (n - k < n_in) acc += static_cast<double>(h[k]) * x[n - k];
    }
    y[n] = static_cast<float>(acc);
  }
}

}  // namespace parallel
}  // namespace vna::kernels
