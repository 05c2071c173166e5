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

#ifndef VNA_AUDIO_IO_HPP
#define VNA_AUDIO_IO_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "vna/audio.hpp"

namespace vna::audio {

/// RIFF/WAVE with 16/24/32-bit integer or 32-bit float samples.
PcmBuffer read_wav(const std::filesystem::path& path);

enum class WavFormat { pcm16, float32 };
void write_wav(const std::filesystem::path& path, const PcmBuffer& buf,
               WavFormat format = WavFormat::float32);

/// Band-limited (windowed-sinc) sample-rate conversion.
PcmBuffer resample(const PcmBuffer& buf, int target_rate);

struct AssetEntry {
  std::string id;
  std::filesystem::path path;
  std::string license;
};

/// Scenario-noise recordings indexed by id. Manifest format:
///   {"assets": [{"id": "park", "path": "park.wav", "license": "CC0"}, ...]}
/// Relative paths resolve against the manifest's directory. Non-WAV files go
/// through the decoder hook (media_io installs the transcoder there).
class AssetLibrary {
 public:
  using Decoder = std::function<PcmBuffer(const std::filesystem::path&)>;

  AssetLibrary() = default;
  explicit AssetLibrary(const std::filesystem::path& manifest);

  void add(AssetEntry entry);
  void set_decoder(Decoder decoder) { decoder_ = std::move(decoder); }
  const std::vector<AssetEntry>& entries() const { return entries_; }

  /// Decoded asset resampled to `sample_rate`, cached per (id, rate).
  const PcmBuffer& get(const std::string& id, int sample_rate);

 private:
  std::vector<AssetEntry> entries_;
  Decoder decoder_;
  std::mutex mutex_;
  std::map<std::pair<std::string, int>, PcmBuffer> cache_;
};

}  // namespace vna::audio

#endif  // VNA_AUDIO_IO_HPP
