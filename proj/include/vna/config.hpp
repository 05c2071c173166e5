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

// Noise configuration model: the kind registry, timed noise items, whole
// specs, their canonical JSON form, and randomized spec generation.

#ifndef VNA_CONFIG_HPP
#define VNA_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vna/media_meta.hpp"

namespace vna {

enum class Modality { audio, video, text, feature };

enum class NoiseKind {
  // audio
  insulate,
  mute,
  reverb_hall,
  reverb_room,
  color_white,
  color_pink,
  color_brown,
  color_blue,
  color_violet,
  color_velvet,
  bg_mix,
  sudden,
  // video
  occlude,
  blank,
  gblur,
  avg_blur,
  add_gauss,
  impulse,
  contrast,
  brightness,
  saturation,
  gamma,
  invert,
  channel_swap,
  // text
  erase,
  replace,
  asr_variant,
  // feature
  random_drop,
  structural_drop,
};

struct KindInfo {
  NoiseKind kind;
  std::string_view name;
  Modality modality;
};

std::span<const KindInfo> kind_registry() noexcept;

/// Resolves a registry name or alias ("reverb" -> reverb_hall).
std::optional<NoiseKind> find_kind(std::string_view name) noexcept;
std::string_view name_of(NoiseKind kind) noexcept;
Modality modality_of(NoiseKind kind) noexcept;

std::string_view name_of(Modality modality) noexcept;
std::optional<Modality> find_modality(std::string_view name) noexcept;

struct NoiseItem {
  Modality modality = Modality::video;
  NoiseKind kind = NoiseKind::gblur;
  double start_s = 0.0;
  double end_s = 0.0;
  double intensity = 0.0;
  /// Kind-specific options; null or an object.
  nlohmann::json params;

  /// True when start/end address word or timestep indices.
  bool index_addressed() const;

  bool operator==(const NoiseItem&) const = default;
};

struct NoiseSpec {
  std::uint64_t seed = 0;
  std::vector<NoiseItem> items;
  /// Filled by validate(); zero means unbound.
  double clip_duration_s = 0.0;

  bool operator==(const NoiseSpec&) const = default;
};

/// A spec that has passed validate() against a particular MediaMeta.
class ValidatedSpec {
 public:
  const NoiseSpec& spec() const noexcept { return spec_; }
  const MediaMeta& meta() const noexcept { return meta_; }

  /// Seed for items()[index]; stable under edits to other items' fields.
  std::uint64_t item_seed(std::size_t index) const noexcept;

 private:
  friend ValidatedSpec validate(const NoiseSpec&, const MediaMeta&);
  NoiseSpec spec_;
  MediaMeta meta_;
};

/// Clamps time-addressed items to [0, duration], resolves defaults, checks
/// kind-specific parameters, and sorts items by (modality, start).
ValidatedSpec validate(const NoiseSpec& spec, const MediaMeta& meta);

enum class RandomMode { random_full, random_segment };

struct ModalityPlan {
  std::vector<std::string> noise_list;
  int noise_num = 0;
  double noise_ratio = 0.0;
  double noise_intensity = 0.0;

  bool operator==(const ModalityPlan&) const = default;
};

/// High-level parameters for random spec generation; JSON field names follow
/// the v_/a_/t_ prefixed vocabulary (v_noise_list, a_noise_num, ...).
struct RandomSpecParams {
  RandomMode mode = RandomMode::random_full;
  ModalityPlan video;
  ModalityPlan audio;
  ModalityPlan text;
  std::uint64_t seed = 0;

  bool operator==(const RandomSpecParams&) const = default;
};

NoiseSpec generate_random(const RandomSpecParams& params, const MediaMeta& meta);

struct JsonOptions {
  /// Prepend the rng algorithm tag; used for config files on disk.
  bool header = false;
  /// Pretty-print with this indent; -1 emits the compact canonical form.
  int indent = -1;
};

std::string to_json(const NoiseSpec& spec, JsonOptions options = {});
NoiseSpec spec_from_json(std::string_view text);
NoiseSpec spec_from_json(const nlohmann::json& j);
inline NoiseSpec spec_from_json(const std::string& text) { return spec_from_json(std::string_view(text)); }
inline NoiseSpec spec_from_json(const char* text) { return spec_from_json(std::string_view(text)); }

std::string to_json(const RandomSpecParams& params, JsonOptions options = {});
RandomSpecParams random_params_from_json(std::string_view text);
RandomSpecParams random_params_from_json(const nlohmann::json& j);
inline RandomSpecParams random_params_from_json(const std::string& text) {
  return random_params_from_json(std::string_view(text));
}

/// Either a concrete spec or a random-generation recipe, as accepted by
/// `vna inject --config`.
struct ConfigFile {
  std::optional<NoiseSpec> spec;
  std::optional<RandomSpecParams> random;
};

ConfigFile load_config_file(const std::string& path);

/// Parses text as JSON, mapping syntax errors to ParseError with line/column.
nlohmann::json parse_json_text(std::string_view text, std::string_view what);

}  // namespace vna

#endif  // VNA_CONFIG_HPP
