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

#ifndef VNA_MEDIA_META_HPP
#define VNA_MEDIA_META_HPP

#include <string>

#include "json.hpp"

namespace vna {

/// Stream layout of one media file. Video fields are meaningful only when
/// has_video, audio fields only when has_audio.
struct MediaMeta {
  double duration_s = 0.0;
  double fps = 0.0;
  int width = 0;
  int height = 0;
  int sample_rate = 0;
  int channels = 0;
  std::string container;
  bool has_video = false;
  bool has_audio = false;

  bool operator==(const MediaMeta&) const = default;
};

nlohmann::json to_json(const MediaMeta& meta);
MediaMeta media_meta_from_json(const nlohmann::json& j);

}  // namespace vna

#endif  // VNA_MEDIA_META_HPP
