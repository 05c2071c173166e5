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

#ifndef VNA_FRAME_HPP
#define VNA_FRAME_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vna {

/// Packed 8-bit RGB, row-major, channel order R,G,B. This is also the raw
/// pipe format exchanged with the transcoder.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h) : width(w), height(h), pixels(byte_size(w, h), 0) {}

  static std::size_t byte_size(int w, int h) {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool operator==(const Frame&) const = default;
};

struct FrameSeq {
  std::vector<Frame> frames;
  double fps = 25.0;

  bool operator==(const FrameSeq&) const = default;
};

}  // namespace vna

#endif  // VNA_FRAME_HPP
