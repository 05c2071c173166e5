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

// Reference kernels. Written for clarity; kept in sync with kernels_omp.cpp
// by the kernel equivalence tests.

#include <algorithm>
#include <vector>

#include "vna/kernels.hpp"
#include "vna/rng.hpp"

namespace vna::kernels::serial {

void convolve_separable(const Frame& in, Frame& out, std::span<const float> taps) {
  const int w = in.width, h = in.height;
  const int radius = static_cast<int>(taps.size() / 2);
  std::vector<float> tmp(Frame::byte_size(w, h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const int sx = reflect_index(x + static_cast<int>(k) - radius, w);
          acc += taps[k] * static_cast<float>(in.at(sx, y)[c]);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  out = Frame(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        for (std::size_t k = 0; k < taps.size(); ++k) {
          const int sy = reflect_index(y + static_cast<int>(k) - radius, h);
          acc += taps[k] * tmp[(static_cast<std::size_t>(sy) * w + x) * 3 + c];
        }
        out.at(x, y)[c] = store_u8(acc);
      }
    }
  }
}

void add_gaussian(Frame& frame, std::uint64_t key, double sigma) {
  const CounterRng rng(key);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    const double v = frame.pixels[i] + sigma * rng.normal(i);
    frame.pixels[i] = store_u8(static_cast<float>(v));
  }
}

void salt_pepper(Frame& frame, std::uint64_t key, double p) {
  const CounterRng rng(key);
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    if (rng.uniform(2 * i) < p) {
      const std::uint8_t v = rng.uniform(2 * i + 1) < 0.5 ? 0 : 255;
      std::fill_n(frame.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i), 3, v);
    }
  }
}

void apply_lut(Frame& frame, const Lut& lut) {
  for (auto& v : frame.pixels) v = lut[v];
}

void saturate(Frame& frame, float factor) {
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    std::uint8_t* px = frame.pixels.data() + 3 * i;
    const float luma = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
    for (int c = 0; c < 3; ++c) px[c] = store_u8(luma + factor * (static_cast<float>(px[c]) - luma));
  }
}

void permute_channels(Frame& frame, std::array<int, 3> order) {
  for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
    std::uint8_t* px = frame.pixels.data() + 3 * i;
    const std::array<std::uint8_t, 3> src{px[0], px[1], px[2]};
    for (int c = 0; c < 3; ++c) px[c] = src[order[c]];
  }
}

void fill_rect(Frame& frame, int x0, int y0, int w, int h) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      std::uint8_t* px = frame.at(x, y);
      px[0] = px[1] = px[2] = 0;
    }
  }
}

void convolve_direct(std::span<const float> x, std::span<const float> h, std::span<float> y) {
  for (std::size_t n = 0; n < y.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size() && k <= n; ++k) {
      if (n - k < x.size()) acc += static_cast<double>(h[k]) * x[n - k];
    }
    y[n] = static_cast<float>(acc);
  }
}

}  // namespace vna::kernels::serial
