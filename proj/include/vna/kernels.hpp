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

// Data-parallel inner loops. Every kernel exists twice with identical
// signatures: `serial` is the plain reference, `parallel` is the OpenMP
// version used by the noise modules. The two must agree bit for bit; the
// kernel tests and the benchmark compare them.

#ifndef VNA_KERNELS_HPP
#define VNA_KERNELS_HPP

#include <array>
#include <cstdint>
#include <span>

#include "vna/frame.hpp"

namespace vna::kernels {

/// Reflect-101 border index (…cb|abcd|cb…) for any integer i and n >= 1.
constexpr int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

/// Round half up and clamp to [0, 255].
inline std::uint8_t store_u8(float v) noexcept {
  const float r = v + 0.5f;
  if (!(r >= 1.0f)) return 0;  // also catches NaN
  if (r >= 255.0f) return 255;
  return static_cast<std::uint8_t>(static_cast<int>(r));
}

using Lut = std::array<std::uint8_t, 256>;

#define VNA_KERNEL_DECLS                                                                    \
  /* Separable 2-D convolution with an odd-length symmetric tap vector, reflect borders. */ \
  void convolve_separable(const Frame& in, Frame& out, std::span<const float> taps);        \
  /* Adds N(0, sigma) per channel, draws keyed by (key, pixel * 3 + channel). */            \
  void add_gaussian(Frame& frame, std::uint64_t key, double sigma);                         \
  /* With probability p per pixel, replaces it by black or white. */                        \
  void salt_pepper(Frame& frame, std::uint64_t key, double p);                              \
  void apply_lut(Frame& frame, const Lut& lut);                                             \
  /* Interpolates each pixel towards its Rec.601 luma by factor. */                         \
  void saturate(Frame& frame, float factor);                                                \
  void permute_channels(Frame& frame, std::array<int, 3> order);                            \
  void fill_rect(Frame& frame, int x, int y, int w, int h);                                 \
  /* y[n] = sum_k h[k] x[n - k] for n < y.size(), x taken as zero outside its span. */     \
  void convolve_direct(std::span<const float> x, std::span<const float> h, std::span<float> y);

namespace serial {
VNA_KERNEL_DECLS
}  // namespace serial

namespace parallel {
VNA_KERNEL_DECLS
}  // namespace parallel

#undef VNA_KERNEL_DECLS

/// Number of OpenMP threads the parallel kernels will use.
int parallel_threads() noexcept;

}  // namespace vna::kernels

#endif  // VNA_KERNELS_HPP
