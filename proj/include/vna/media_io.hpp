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

// Transcoder-backed media plumbing. ffmpeg is the only process boundary:
// video crosses it as packed rgb24 frames, audio as interleaved float32 at the
// native rate. All noise math runs in-process on those raw buffers.
//
// Raw taps (InjectOptions::tap_dir) record the bytes entering and leaving the
// noise stage:
//   video_in.rgb / video_out.rgb   concatenated rgb24 frames
//   audio_in.f32 / audio_out.f32   interleaved float32 little-endian

#ifndef VNA_MEDIA_IO_HPP
#define VNA_MEDIA_IO_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vna/audio.hpp"
#include "vna/config.hpp"
#include "vna/frame.hpp"
#include "vna/media_meta.hpp"
#include "vna/text.hpp"

namespace vna::audio {
class AssetLibrary;
}

namespace vna::media {

/// Environment variable naming the ffmpeg binary. Falls back to `ffmpeg` on
/// PATH.
inline constexpr const char* kTranscoderEnv = "VNA_FFMPEG";

/// Resolved transcoder path; throws TranscoderMissing.
std::string transcoder();

/// Throws UnreadableMedia for missing or undecodable files.
MediaMeta probe(const std::filesystem::path& path);

/// Parses the stream summary ffmpeg prints for `-i`. Exposed for tests.
MediaMeta parse_probe_output(const std::string& text);

/// Streams decoded rgb24 frames to `visit` (the frame buffer is reused) and
/// returns the frame rate.
double for_each_frame(const std::filesystem::path& path,
                      const std::function<void(const Frame&, std::size_t)>& visit);

/// Whole-file decodes; used by tests, evaluation, and the service.
FrameSeq decode_video(const std::filesystem::path& path);
audio::PcmBuffer decode_audio(const std::filesystem::path& path);

/// Installs decode_audio as the library's non-WAV decoder.
void install_decoder(audio::AssetLibrary& assets);

struct InjectOptions {
  /// ffv1 + pcm_f32le; requires a Matroska-family output.
  bool lossless = false;
  std::optional<std::filesystem::path> tap_dir;
  /// Source transcript for text items; written back next to the output.
  std::optional<text::Transcript> transcript;
  audio::AssetLibrary* assets = nullptr;
  std::size_t queue_depth = 8;
};

struct AppliedItem {
  std::size_t index = 0;
  NoiseItem item;
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string note;
};

struct InjectionReport {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> transcript_path;
  std::vector<AppliedItem> items;
  std::size_t frames = 0;
  std::size_t samples = 0;
  double wall_time_s = 0.0;
};

nlohmann::json to_json(const InjectionReport& report);

/// Path of the transcript artifact written beside `output`.
std::filesystem::path transcript_artifact(const std::filesystem::path& output);

InjectionReport inject(const std::filesystem::path& input, const std::filesystem::path& output,
                       const ValidatedSpec& spec, const InjectOptions& options = {});

}  // namespace vna::media

#endif  // VNA_MEDIA_IO_HPP
