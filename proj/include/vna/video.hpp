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

// Visual perturbations on RGB frame sequences.
//
// Intensity mappings (all identity at intensity 0, adjustments at 0.5):
//   gblur       sigma = 10 * intensity px, radius ceil(3 sigma)
//   avg_blur    k = 2 * round(5 * intensity) + 1
//   add_gauss   sigma = 51 * intensity gray levels
//   impulse     strength = 100 * intensity, p = strength / 1000
//   contrast / saturation  f = 1 + 2 (intensity - 0.5)
//   brightness  offset = 255 (intensity - 0.5)
//   gamma       4^(intensity - 0.5)
//   occlude     centered box with area fraction = intensity (auto box)
//   blank, invert, channel_swap  applied whenever intensity > 0

#ifndef VNA_VIDEO_HPP
#define VNA_VIDEO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vna/config.hpp"
#include "vna/frame.hpp"

namespace vna::video {

struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
};

/// Frames [first, last) touched by a segment: floor(start * fps) to
/// ceil(end * fps), clipped to the sequence.
std::pair<std::size_t, std::size_t> frame_range(Segment seg, double fps, std::size_t n_frames);

struct Box {
  int x = 0, y = 0, w = 0, h = 0;
};

Box auto_box(int width, int height, double intensity);
std::vector<float> gaussian_taps(double sigma);
int box_kernel_size(double intensity);

enum class Adjust { contrast, brightness, saturation, gamma };

/// Single-frame primitives. The sequence operations below and the streaming
/// pipeline in media_io both go through these.
void occlude_frame(Frame& frame, double intensity, std::optional<Box> box);
void blank_frame(Frame& frame, double intensity);
void gaussian_blur_frame(Frame& frame, double intensity);
void average_blur_frame(Frame& frame, double intensity);
void additive_gaussian_frame(Frame& frame, double intensity, std::uint64_t seed,
                             std::size_t frame_index);
void impulse_frame(Frame& frame, double intensity, std::uint64_t seed, std::size_t frame_index);
void color_adjust_frame(Frame& frame, Adjust kind, double intensity);
void invert_frame(Frame& frame);
void channel_swap_frame(Frame& frame, std::string_view order);

/// Applies one validated video item to a frame at `frame_index`.
void apply_item(Frame& frame, const NoiseItem& item, std::uint64_t item_seed,
                std::size_t frame_index);

FrameSeq occlude(const FrameSeq& seq, Segment seg, double intensity,
                 std::optional<Box> box = std::nullopt);
FrameSeq blank(const FrameSeq& seq, Segment seg, double intensity);
FrameSeq gaussian_blur(const FrameSeq& seq, Segment seg, double intensity);
FrameSeq average_blur(const FrameSeq& seq, Segment seg, double intensity);
FrameSeq additive_gaussian(const FrameSeq& seq, Segment seg, double intensity, std::uint64_t seed);
FrameSeq impulse(const FrameSeq& seq, Segment seg, double intensity, std::uint64_t seed);
FrameSeq color_adjust(const FrameSeq& seq, Segment seg, Adjust kind, double intensity);
FrameSeq invert(const FrameSeq& seq, Segment seg);
FrameSeq channel_swap(const FrameSeq& seq, Segment seg, std::string_view order);

/// Parses "BGR"-style orders into source channel indices.
std::array<int, 3> parse_channel_order(std::string_view order);

}  // namespace vna::video

#endif  // VNA_VIDEO_HPP
