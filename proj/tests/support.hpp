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

// Shared fixtures: scratch directories and synthetic clips made with the
// transcoder's lavfi sources.

#ifndef VNA_TESTS_SUPPORT_HPP
#define VNA_TESTS_SUPPORT_HPP

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "vna/error.hpp"
#include "vna/media_io.hpp"
#include "vna/subprocess.hpp"

namespace vna::test {

namespace fs = std::filesystem;

inline fs::path scratch_root() { return fs::temp_directory_path() / ("vna-test-" + std::to_string(::getpid())); }

inline fs::path scratch(const std::string& name) {
  const auto dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct ClipOptions {
  int width = 160;
  int height = 120;
  int fps = 25;
  double duration_s = 10.0;
  int sample_rate = 16000;
  int channels = 1;
  bool video = true;
  bool audio = true;
  std::string vcodec = "ffv1";
  std::string acodec = "pcm_s16le";
  /// Varies the picture so different clips are distinguishable.
  int pattern = 0;
};

inline void make_clip(const fs::path& path, const ClipOptions& o = {}) {
  std::vector<std::string> args = {media::transcoder(), "-hide_banner", "-nostdin", "-v", "error", "-y"};
  const std::string dur = std::to_string(o.duration_s);
  if (o.video) {
    args.insert(args.end(),
                {"-f", "lavfi", "-i",
                 "testsrc2=size=" + std::to_string(o.width) + "x" + std::to_string(o.height) +
                     ":rate=" + std::to_string(o.fps) + ":duration=" + dur +
                     (o.pattern != 0 ? ",hue=h=" + std::to_string(o.pattern * 37) : std::string())});
  }
  if (o.audio) {
    args.insert(args.end(), {"-f", "lavfi", "-i",
                             "sine=frequency=" + std::to_string(220 + 40 * o.pattern) +
                                 ":sample_rate=" + std::to_string(o.sample_rate) + ":duration=" + dur});
  }
  if (o.audio && o.channels > 1) args.insert(args.end(), {"-ac", std::to_string(o.channels)});
  if (o.video) args.insert(args.end(), {"-c:v", o.vcodec});
  if (o.video && o.vcodec == "libx264") args.insert(args.end(), {"-preset", "ultrafast", "-pix_fmt", "yuv420p"});
  if (o.audio) args.insert(args.end(), {"-c:a", o.acodec});
  args.push_back(path.string());
  const auto r = proc::run(args);
  if (r.exit_code != 0) throw Error(ErrorCode::Io, "fixture encode failed: " + r.err);
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace vna::test

#endif  // VNA_TESTS_SUPPORT_HPP
