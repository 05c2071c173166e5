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

#include "vna/video.hpp"

#include <algorithm>
#include <cmath>

#include "vna/error.hpp"
#include "vna/kernels.hpp"
#include "vna/rng.hpp"

namespace vna::video {

namespace {

constexpr double kTickEps = 1e-9;

template <typename Fn>
FrameSeq map_segment(const FrameSeq& seq, Segment seg, Fn&& fn) {
  FrameSeq out = seq;
  const auto [first, last] = frame_range(seg, seq.fps, seq.frames.size());
  for (std::size_t i = first; i < last; ++i) fn(out.frames[i], i);
  return out;
}

kernels::Lut make_lut(Adjust kind, double intensity) {
  kernels::Lut lut{};
  const float t = static_cast<float>(intensity - 0.5);
  for (int v = 0; v < 256; ++v) {
    const float x = static_cast<float>(v);
    float y = x;
    switch (kind) {
      case Adjust::contrast: y = 128.0f + (1.0f + 2.0f * t) * (x - 128.0f); break;
      case Adjust::brightness: y = x + 255.0f * t; break;
      case Adjust::gamma: {
        const double g = std::pow(4.0, intensity - 0.5);
        y = static_cast<float>(255.0 * std::pow(v / 255.0, g));
        break;
      }
      case Adjust::saturation: break;
    }
    lut[v] = kernels::store_u8(y);
  }
  return lut;
}

}  // namespace

std::pair<std::size_t, std::size_t> frame_range(Segment seg, double fps, std::size_t n_frames) {
  const double a = std::floor(seg.start_s * fps + kTickEps);
  const double b = std::ceil(seg.end_s * fps - kTickEps);
  const auto first = static_cast<std::size_t>(std::clamp(a, 0.0, static_cast<double>(n_frames)));
  const auto last = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(n_frames)));
  return {first, std::max(first, last)};
}

Box auto_box(int width, int height, double intensity) {
  const double scale = std::sqrt(std::clamp(intensity, 0.0, 1.0));
  Box box;
  box.w = static_cast<int>(std::lround(width * scale));
  box.h = static_cast<int>(std::lround(height * scale));
  box.x = (width - box.w) / 2;
  box.y = (height - box.h) / 2;
  return box;
}

std::vector<float> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) return {1.0f};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += w[k + radius];
  }
  std::vector<float> taps(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) taps[i] = static_cast<float>(w[i] / sum);
  return taps;
}

int box_kernel_size(double intensity) {
  return 2 * static_cast<int>(std::lround(5.0 * std::clamp(intensity, 0.0, 1.0))) + 1;
}

std::array<int, 3> parse_channel_order(std::string_view order) {
  std::array<int, 3> idx{};
  std::array<bool, 3> seen{};
  if (order.size() != 3) throw Error(ErrorCode::BadPermutation, "order '" + std::string(order) + "'");
  for (std::size_t c = 0; c < 3; ++c) {
    int src = -1;
    switch (order[c]) {
      case 'R': src = 0; break;
      case 'G': src = 1; break;
      case 'B': src = 2; break;
      default: break;
    }
    if (src < 0 || seen[src]) {
      throw Error(ErrorCode::BadPermutation, "order '" + std::string(order) + "'");
    }
    seen[src] = true;
    idx[c] = src;
  }
  return idx;
}

void occlude_frame(Frame& frame, double intensity, std::optional<Box> box) {
  Box b;
  if (box) {
    if (box->x < 0 || box->y < 0 || box->w < 0 || box->h < 0 || box->x + box->w > frame.width ||
        box->y + box->h > frame.height) {
      throw Error(ErrorCode::BoxOutOfBounds, "box exceeds " + std::to_string(frame.width) + "x" +
                                                 std::to_string(frame.height) + " frame");
    }
    if (intensity <= 0.0) return;
    b = *box;
  } else {
    b = auto_box(frame.width, frame.height, intensity);
  }
  if (b.w > 0 && b.h > 0) kernels::parallel::fill_rect(frame, b.x, b.y, b.w, b.h);
}

void blank_frame(Frame& frame, double intensity) {
  if (intensity > 0.0) std::fill(frame.pixels.begin(), frame.pixels.end(), std::uint8_t{0});
}

void gaussian_blur_frame(Frame& frame, double intensity) {
  const double sigma = 10.0 * intensity;
  if (!(sigma > 0.0)) return;
  const auto taps = gaussian_taps(sigma);
  Frame out;
  kernels::parallel::convolve_separable(frame, out, taps);
  frame = std::move(out);
}

void average_blur_frame(Frame& frame, double intensity) {
  const int k = box_kernel_size(intensity);
  if (k <= 1) return;
  const std::vector<float> taps(static_cast<std::size_t>(k), 1.0f / static_cast<float>(k));
  Frame out;
  kernels::parallel::convolve_separable(frame, out, taps);
  frame = std::move(out);
}

void additive_gaussian_frame(Frame& frame, double intensity, std::uint64_t seed,
                             std::size_t frame_index) {
  const double sigma = 51.0 * intensity;
  if (!(sigma > 0.0)) return;
  kernels::parallel::add_gaussian(frame, derive_seed(seed, frame_index), sigma);
}

void impulse_frame(Frame& frame, double intensity, std::uint64_t seed, std::size_t frame_index) {
  const double strength = 100.0 * intensity;
  const double p = strength / 1000.0;
  if (!(p > 0.0)) return;
  kernels::parallel::salt_pepper(frame, derive_seed(seed, frame_index), p);
}

void color_adjust_frame(Frame& frame, Adjust kind, double intensity) {
  if (intensity == 0.5) return;
  if (kind == Adjust::saturation) {
    kernels::parallel::saturate(frame, static_cast<float>(1.0 + 2.0 * (intensity - 0.5)));
  } else {
    kernels::parallel::apply_lut(frame, make_lut(kind, intensity));
  }
}

void invert_frame(Frame& frame) {
  kernels::Lut lut{};
  for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(255 - v);
  kernels::parallel::apply_lut(frame, lut);
}

void channel_swap_frame(Frame& frame, std::string_view order) {
  const auto idx = parse_channel_order(order);
  if (idx == std::array<int, 3>{0, 1, 2}) return;
  kernels::parallel::permute_channels(frame, idx);
}

void apply_item(Frame& frame, const NoiseItem& item, std::uint64_t item_seed,
                std::size_t frame_index) {
  const double s = item.intensity;
  const auto& p = item.params;
  switch (item.kind) {
    case NoiseKind::occlude: {
      std::optional<Box> box;
      if (p.is_object() && p.contains("w")) {
        box = Box{p.at("x").get<int>(), p.at("y").get<int>(), p.at("w").get<int>(), p.at("h").get<int>()};
      }
      occlude_frame(frame, s, box);
      break;
    }
    case NoiseKind::blank: blank_frame(frame, s); break;
    case NoiseKind::gblur: gaussian_blur_frame(frame, s); break;
    case NoiseKind::avg_blur: average_blur_frame(frame, s); break;
    case NoiseKind::add_gauss: additive_gaussian_frame(frame, s, item_seed, frame_index); break;
    case NoiseKind::impulse: impulse_frame(frame, s, item_seed, frame_index); break;
    case NoiseKind::contrast: color_adjust_frame(frame, Adjust::contrast, s); break;
    case NoiseKind::brightness: color_adjust_frame(frame, Adjust::brightness, s); break;
    case NoiseKind::saturation: color_adjust_frame(frame, Adjust::saturation, s); break;
    case NoiseKind::gamma: color_adjust_frame(frame, Adjust::gamma, s); break;
    case NoiseKind::invert:
      if (s > 0.0) invert_frame(frame);
      break;
    case NoiseKind::channel_swap:
      if (s > 0.0) {
        const std::string order =
            p.is_object() && p.contains("order") ? p.at("order").get<std::string>() : "BGR";
        channel_swap_frame(frame, order);
      }
      break;
    default:
      throw Error(ErrorCode::UnknownKind,
                  "'" + std::string(name_of(item.kind)) + "' is not a video kind");
  }
}

FrameSeq occlude(const FrameSeq& seq, Segment seg, double intensity, std::optional<Box> box) {
  return map_segment(seq, seg, [&](Frame& f, std::size_t) { occlude_frame(f, intensity, box); });
}

FrameSeq blank(const FrameSeq& seq, Segment seg, double intensity) {
  return map_segment(seq, seg, [&](Frame& f, std::size_t) { blank_frame(f, intensity); });
}

FrameSeq gaussian_blur(const FrameSeq& seq, Segment seg, double intensity) {
  return map_segment(seq, seg, [&](Frame& f, std::size_t) { gaussian_blur_frame(f, intensity); });
}

FrameSeq average_blur(const FrameSeq& seq, Segment seg, double intensity) {
  return map_segment(seq, seg, [&](Frame& f, std::size_t) { average_blur_frame(f, intensity); });
}

FrameSeq additive_gaussian(const FrameSeq& seq, Segment seg, double intensity, std::uint64_t seed) {
  return map_segment(seq, seg, [&](Frame& f, std::size_t i) {
    additive_gaussian_frame(f, intensity, seed, i);
  });
}

FrameSeq impulse(const FrameSeq& seq, Segment seg, double intensity, std::uint64_t seed) {
  return map_segment(seq, seg,
                     [&](Frame& f, std::size_t i) { impulse_frame(f, intensity, seed, i); });
}

FrameSeq color_adjust(const FrameSeq& seq, Segment seg, Adjust kind, double intensity) {
  return map_segment(seq, seg,
                     [&](Frame& f, std::size_t) { color_adjust_frame(f, kind, intensity); });
}

FrameSeq invert(const FrameSeq& seq, Segment seg) {
  return map_segment(seq, seg, [](Frame& f, std::size_t) { invert_frame(f); });
}

FrameSeq channel_swap(const FrameSeq& seq, Segment seg, std::string_view order) {
  parse_channel_order(order);
  return map_segment(seq, seg, [&](Frame& f, std::size_t) { channel_swap_frame(f, order); });
}

}  // namespace vna::video
