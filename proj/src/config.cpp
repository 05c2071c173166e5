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

#include "vna/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vna/error.hpp"
#include "vna/rng.hpp"

namespace vna {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::array<KindInfo, 29> kRegistry{{
    {NoiseKind::insulate, "insulate", Modality::audio},
    {NoiseKind::mute, "mute", Modality::audio},
    {NoiseKind::reverb_hall, "reverb_hall", Modality::audio},
    {NoiseKind::reverb_room, "reverb_room", Modality::audio},
    {NoiseKind::color_white, "color_white", Modality::audio},
    {NoiseKind::color_pink, "color_pink", Modality::audio},
    {NoiseKind::color_brown, "color_brown", Modality::audio},
    {NoiseKind::color_blue, "color_blue", Modality::audio},
    {NoiseKind::color_violet, "color_violet", Modality::audio},
    {NoiseKind::color_velvet, "color_velvet", Modality::audio},
    {NoiseKind::bg_mix, "bg_mix", Modality::audio},
    {NoiseKind::sudden, "sudden", Modality::audio},
    {NoiseKind::occlude, "occlude", Modality::video},
    {NoiseKind::blank, "blank", Modality::video},
    {NoiseKind::gblur, "gblur", Modality::video},
    {NoiseKind::avg_blur, "avg_blur", Modality::video},
    {NoiseKind::add_gauss, "add_gauss", Modality::video},
    {NoiseKind::impulse, "impulse", Modality::video},
    {NoiseKind::contrast, "contrast", Modality::video},
    {NoiseKind::brightness, "brightness", Modality::video},
    {NoiseKind::saturation, "saturation", Modality::video},
    {NoiseKind::gamma, "gamma", Modality::video},
    {NoiseKind::invert, "invert", Modality::video},
    {NoiseKind::channel_swap, "channel_swap", Modality::video},
    {NoiseKind::erase, "erase", Modality::text},
    {NoiseKind::replace, "replace", Modality::text},
    {NoiseKind::asr_variant, "asr_variant", Modality::text},
    {NoiseKind::random_drop, "random_drop", Modality::feature},
    {NoiseKind::structural_drop, "structural_drop", Modality::feature},
}};

struct Alias {
  std::string_view name;
  NoiseKind kind;
};

// Short names used by the original toolkit's random-config vocabulary.
constexpr std::array<Alias, 6> kAliases{{
    {"reverb", NoiseKind::reverb_hall},
    {"white", NoiseKind::color_white},
    {"pink", NoiseKind::color_pink},
    {"brown", NoiseKind::color_brown},
    {"blur", NoiseKind::gblur},
    {"background", NoiseKind::bg_mix},
}};

constexpr std::array<std::string_view, 4> kModalityNames{"audio", "video", "text",
                                                         "feature"};

[[noreturn]] void fail(ErrorCode code, const std::string& where, const std::string& what) {
  throw Error(code, where.empty() ? what : where + ": " + what);
}

std::string item_path(std::size_t index) { return "items[" + std::to_string(index) + "]"; }

bool is_permutation_of_rgb(const std::string& order) {
  if (order.size() != 3) return false;
  std::string sorted = order;
  std::sort(sorted.begin(), sorted.end());
  return sorted == "BGR";
}

void check_item_invariants(const NoiseItem& item, const std::string& where) {
  if (!(item.intensity >= 0.0 && item.intensity <= 1.0)) {
    fail(ErrorCode::BadIntensity, where, "intensity " + std::to_string(item.intensity) +
                                             " outside [0, 1]");
  }
  if (modality_of(item.kind) != item.modality) {
    fail(ErrorCode::UnknownKind, where,
         "kind '" + std::string(name_of(item.kind)) + "' does not belong to modality '" +
             std::string(name_of(item.modality)) + "'");
  }
  if (!std::isfinite(item.start_s) || !std::isfinite(item.end_s) || item.start_s < 0.0) {
    fail(ErrorCode::EmptyInterval, where, "start/end must be finite and start >= 0");
  }
  if (!(item.end_s > item.start_s)) {
    fail(ErrorCode::EmptyInterval, where, "end must be greater than start");
  }
  if (!item.params.is_null() && !item.params.is_object()) {
    fail(ErrorCode::ParseError, where + ".params", "must be an object");
  }
}

json params_or_empty(const NoiseItem& item) {
  return item.params.is_object() ? item.params : json::object();
}

// Kind-specific parameter checks and defaults.
void resolve_params(NoiseItem& item, const MediaMeta& meta, const std::string& where) {
  json p = params_or_empty(item);
  switch (item.kind) {
    case NoiseKind::occlude: {
      const bool any = p.contains("x") || p.contains("y") || p.contains("w") || p.contains("h");
      if (any) {
        for (const char* key : {"x", "y", "w", "h"}) {
          if (!p.contains(key) || !p[key].is_number_integer()) {
            fail(ErrorCode::ParseError, where + ".params." + key, "integer required for explicit box");
          }
        }
        const auto x = p["x"].get<long long>(), y = p["y"].get<long long>();
        const auto w = p["w"].get<long long>(), h = p["h"].get<long long>();
        if (x < 0 || y < 0 || w <= 0 || h <= 0 ||
            (meta.has_video && (x + w > meta.width || y + h > meta.height))) {
          fail(ErrorCode::BoxOutOfBounds, where + ".params",
               "box does not fit a " + std::to_string(meta.width) + "x" +
                   std::to_string(meta.height) + " frame");
        }
      }
      break;
    }
    case NoiseKind::channel_swap: {
      if (!p.contains("order")) p["order"] = "BGR";
      if (!p["order"].is_string() || !is_permutation_of_rgb(p["order"].get<std::string>())) {
        fail(ErrorCode::BadPermutation, where + ".params.order", "must be a permutation of RGB");
      }
      break;
    }
    case NoiseKind::bg_mix:
    case NoiseKind::sudden:
      if (!p.contains("asset") || !p["asset"].is_string()) {
        fail(ErrorCode::ParseError, where + ".params.asset", "scenario noise needs an asset id");
      }
      break;
    case NoiseKind::asr_variant:
      if (!p.contains("path") || !p["path"].is_string()) {
        fail(ErrorCode::ParseError, where + ".params.path", "ASR transcript path required");
      }
      break;
    case NoiseKind::replace:
      if (p.contains("lexicon")) {
        if (!p["lexicon"].is_array()) {
          fail(ErrorCode::ParseError, where + ".params.lexicon", "must be an array of strings");
        }
        if (p["lexicon"].empty()) {
          fail(ErrorCode::EmptyLexicon, where + ".params.lexicon", "lexicon is empty");
        }
      }
      break;
    default:
      break;
  }
  if (item.modality == Modality::text || item.modality == Modality::feature) {
    if (!p.contains("unit")) p["unit"] = "seconds";
    const auto unit = p["unit"].is_string() ? p["unit"].get<std::string>() : std::string();
    if (unit != "seconds" && unit != "index") {
      fail(ErrorCode::ParseError, where + ".params.unit", "must be 'seconds' or 'index'");
    }
    if (item.modality == Modality::feature && unit == "seconds" &&
        !(p.contains("rate") && p["rate"].is_number() && p["rate"].get<double>() > 0.0)) {
      fail(ErrorCode::ParseError, where + ".params.rate",
           "feature items addressed in seconds need a positive timestep rate");
    }
  }
  item.params = p.empty() ? json() : p;
}

double tick_rate(Modality m, const MediaMeta& meta) {
  switch (m) {
    case Modality::video: return meta.has_video && meta.fps > 0 ? meta.fps : 1000.0;
    case Modality::audio:
      return meta.has_audio && meta.sample_rate > 0 ? meta.sample_rate : 1000.0;
    default: return 1000.0;
  }
}

// Floyd's algorithm: k distinct values from [0, n), returned sorted.
std::vector<std::int64_t> sample_distinct(SequentialRng& rng, std::int64_t n, std::int64_t k) {
  std::vector<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j + 1)));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

void generate_modality(const ModalityPlan& plan, Modality modality, std::string_view prefix,
                       const MediaMeta& meta, std::uint64_t seed,
                       std::vector<NoiseItem>& out) {
  if (plan.noise_num < 0) {
    fail(ErrorCode::InfeasibleLayout, std::string(prefix) + "_noise_num", "must be >= 0");
  }
  if (plan.noise_num == 0) return;
  if (plan.noise_list.empty()) {
    fail(ErrorCode::ParseError, std::string(prefix) + "_noise_list",
         "must be non-empty when noise_num > 0");
  }
  if (!(plan.noise_ratio >= 0.0 && plan.noise_ratio <= 1.0)) {
    fail(ErrorCode::InfeasibleLayout, std::string(prefix) + "_noise_ratio", "must lie in [0, 1]");
  }
  if (!(plan.noise_intensity >= 0.0 && plan.noise_intensity <= 1.0)) {
    fail(ErrorCode::BadIntensity, std::string(prefix) + "_noise_intensity", "must lie in [0, 1]");
  }
  std::vector<NoiseKind> kinds;
  for (const auto& name : plan.noise_list) {
    const auto kind = find_kind(name);
    if (!kind) fail(ErrorCode::UnknownKind, std::string(prefix) + "_noise_list", "'" + name + "'");
    if (modality_of(*kind) != modality) {
      fail(ErrorCode::UnknownKind, std::string(prefix) + "_noise_list",
           "'" + name + "' is not a " + std::string(name_of(modality)) + " kind");
    }
    kinds.push_back(*kind);
  }

  const double rate = tick_rate(modality, meta);
  const auto total_ticks = static_cast<std::int64_t>(std::llround(meta.duration_s * rate));
  const auto noisy_ticks = static_cast<std::int64_t>(std::llround(plan.noise_ratio * total_ticks));
  const std::int64_t num = plan.noise_num;
  if (noisy_ticks < num) {
    fail(ErrorCode::InfeasibleLayout, std::string(prefix),
         std::to_string(num) + " segments cannot fit in " + std::to_string(noisy_ticks) +
             " ticks of noise");
  }

  SequentialRng rng(derive_seed(seed, static_cast<std::uint64_t>(modality) + 1));
  // Segment lengths: a random composition of noisy_ticks into num positive parts.
  std::vector<std::int64_t> lengths;
  {
    const auto cuts = sample_distinct(rng, noisy_ticks - 1, num - 1);
    std::int64_t prev = 0;
    for (auto c : cuts) {
      lengths.push_back(c + 1 - prev);
      prev = c + 1;
    }
    lengths.push_back(noisy_ticks - prev);
  }
  // Gaps: stars and bars over the free ticks.
  const std::int64_t free_ticks = total_ticks - noisy_ticks;
  const auto slots = sample_distinct(rng, free_ticks + num, num);

  std::int64_t covered = 0;
  for (std::int64_t j = 0; j < num; ++j) {
    const std::int64_t start = slots[j] - j + covered;
    covered += lengths[j];
    NoiseItem item;
    item.modality = modality;
    item.kind = kinds[rng.below(kinds.size())];
    item.start_s = static_cast<double>(start) / rate;
    item.end_s = static_cast<double>(start + lengths[j]) / rate;
    item.intensity = plan.noise_intensity;
    out.push_back(std::move(item));
  }
}

void sort_items(std::vector<NoiseItem>& items) {
  std::stable_sort(items.begin(), items.end(), [](const NoiseItem& a, const NoiseItem& b) {
    if (a.modality != b.modality) return a.modality < b.modality;
    return a.start_s < b.start_s;
  });
}

ojson item_to_json(const NoiseItem& item) {
  ojson j;
  j["modality"] = name_of(item.modality);
  j["kind"] = name_of(item.kind);
  j["start_s"] = item.start_s;
  j["end_s"] = item.end_s;
  j["intensity"] = item.intensity;
  if (item.params.is_object() && !item.params.empty()) {
    j["params"] = ojson::parse(item.params.dump());
  }
  return j;
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(ErrorCode::ParseError, where, std::string("missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::ParseError, where + "." + key, "wrong type");
  }
}

NoiseItem item_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ParseError, where, "item must be an object");
  NoiseItem item;
  const auto kind_name = field<std::string>(j, "kind", where);
  const auto kind = find_kind(kind_name);
  if (!kind) fail(ErrorCode::UnknownKind, where + ".kind", "'" + kind_name + "'");
  item.kind = *kind;
  if (j.contains("modality")) {
    const auto mod_name = field<std::string>(j, "modality", where);
    const auto mod = find_modality(mod_name);
    if (!mod) fail(ErrorCode::ParseError, where + ".modality", "'" + mod_name + "'");
    item.modality = *mod;
  } else {
    item.modality = modality_of(item.kind);
  }
  item.start_s = field<double>(j, "start_s", where);
  item.end_s = field<double>(j, "end_s", where);
  item.intensity = field<double>(j, "intensity", where);
  if (j.contains("params") && !j["params"].is_null()) item.params = j["params"];
  check_item_invariants(item, where);
  return item;
}

ojson plan_to_json(ojson& j, std::string_view prefix, const ModalityPlan& plan) {
  const std::string p(prefix);
  j[p + "_noise_list"] = plan.noise_list;
  j[p + "_noise_num"] = plan.noise_num;
  j[p + "_noise_ratio"] = plan.noise_ratio;
  j[p + "_noise_intensity"] = plan.noise_intensity;
  return j;
}

ModalityPlan plan_from_json(const json& j, std::string_view prefix) {
  const std::string p(prefix);
  ModalityPlan plan;
  if (j.contains(p + "_noise_list")) {
    plan.noise_list = field<std::vector<std::string>>(j, (p + "_noise_list").c_str(), "config");
  }
  if (j.contains(p + "_noise_num")) plan.noise_num = field<int>(j, (p + "_noise_num").c_str(), "config");
  if (j.contains(p + "_noise_ratio")) {
    plan.noise_ratio = field<double>(j, (p + "_noise_ratio").c_str(), "config");
  }
  if (j.contains(p + "_noise_intensity")) {
    plan.noise_intensity = field<double>(j, (p + "_noise_intensity").c_str(), "config");
  }
  return plan;
}

void check_rng_header(const json& j) {
  if (j.contains("rng")) {
    if (!j["rng"].is_string() || j["rng"].get<std::string>() != kRngAlgorithm) {
      fail(ErrorCode::ParseError, "rng",
           "config was written with rng '" + j["rng"].dump() + "', this build uses '" +
               std::string(kRngAlgorithm) + "'");
    }
  }
}

std::string dump(const ojson& j, int indent) {
  auto s = j.dump(indent);
  if (indent >= 0) s += '\n';
  return s;
}

}  // namespace

std::span<const KindInfo> kind_registry() noexcept { return kRegistry; }

std::optional<NoiseKind> find_kind(std::string_view name) noexcept {
  for (const auto& info : kRegistry) {
    if (info.name == name) return info.kind;
  }
  for (const auto& alias : kAliases) {
    if (alias.name == name) return alias.kind;
  }
  return std::nullopt;
}

std::string_view name_of(NoiseKind kind) noexcept {
  return kRegistry[static_cast<std::size_t>(kind)].name;
}

Modality modality_of(NoiseKind kind) noexcept {
  return kRegistry[static_cast<std::size_t>(kind)].modality;
}

std::string_view name_of(Modality modality) noexcept {
  return kModalityNames[static_cast<std::size_t>(modality)];
}

std::optional<Modality> find_modality(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kModalityNames.size(); ++i) {
    if (kModalityNames[i] == name) return static_cast<Modality>(i);
  }
  return std::nullopt;
}

bool NoiseItem::index_addressed() const {
  return params.is_object() && params.contains("unit") && params["unit"] == "index";
}

std::uint64_t ValidatedSpec::item_seed(std::size_t index) const noexcept {
  return derive_seed(spec_.seed, static_cast<std::uint64_t>(index) + 1);
}

ValidatedSpec validate(const NoiseSpec& spec, const MediaMeta& meta) {
  ValidatedSpec out;
  out.meta_ = meta;
  out.spec_.seed = spec.seed;
  out.spec_.clip_duration_s = meta.duration_s;
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    NoiseItem item = spec.items[i];
    const auto where = item_path(i);
    check_item_invariants(item, where);
    resolve_params(item, meta, where);
    if (!item.index_addressed() && meta.duration_s > 0.0) {
      item.start_s = std::clamp(item.start_s, 0.0, meta.duration_s);
      item.end_s = std::clamp(item.end_s, 0.0, meta.duration_s);
      if (!(item.end_s > item.start_s)) {
        fail(ErrorCode::EmptyInterval, where, "segment lies outside the clip after clamping");
      }
    }
    out.spec_.items.push_back(std::move(item));
  }
  sort_items(out.spec_.items);
  return out;
}

NoiseSpec generate_random(const RandomSpecParams& params, const MediaMeta& meta) {
  if (params.mode != RandomMode::random_full) {
    fail(ErrorCode::UnknownMode, "mode", "only 'random_full' is defined");
  }
  if (!(meta.duration_s > 0.0)) fail(ErrorCode::InfeasibleLayout, "media", "clip duration must be positive");
  NoiseSpec spec;
  spec.seed = params.seed;
  spec.clip_duration_s = meta.duration_s;
  generate_modality(params.audio, Modality::audio, "a", meta, params.seed, spec.items);
  generate_modality(params.video, Modality::video, "v", meta, params.seed, spec.items);
  generate_modality(params.text, Modality::text, "t", meta, params.seed, spec.items);
  sort_items(spec.items);
  return spec;
}

std::string to_json(const NoiseSpec& spec, JsonOptions options) {
  ojson j;
  if (options.header) j["rng"] = kRngAlgorithm;
  j["seed"] = spec.seed;
  if (spec.clip_duration_s > 0.0) j["clip_duration_s"] = spec.clip_duration_s;
  j["items"] = ojson::array();
  for (const auto& item : spec.items) j["items"].push_back(item_to_json(item));
  return dump(j, options.indent);
}

nlohmann::json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Map the byte offset to a line/column for humans.
    std::size_t line = 1, col = 1;
    const auto stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError, std::string(what) + " line " + std::to_string(line) +
                                           " column " + std::to_string(col) + ": malformed JSON");
  }
}

NoiseSpec spec_from_json(std::string_view text) {
  return spec_from_json(parse_json_text(text, "noise spec"));
}

NoiseSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "", "noise spec must be a JSON object");
  check_rng_header(j);
  NoiseSpec spec;
  if (j.contains("seed")) spec.seed = field<std::uint64_t>(j, "seed", "spec");
  if (j.contains("clip_duration_s")) spec.clip_duration_s = field<double>(j, "clip_duration_s", "spec");
  if (!j.contains("items") || !j["items"].is_array()) {
    fail(ErrorCode::ParseError, "items", "array required");
  }
  const auto& items = j["items"];
  for (std::size_t i = 0; i < items.size(); ++i) {
    spec.items.push_back(item_from_json(items[i], item_path(i)));
  }
  return spec;
}

std::string to_json(const RandomSpecParams& params, JsonOptions options) {
  ojson j;
  if (options.header) j["rng"] = kRngAlgorithm;
  j["mode"] = params.mode == RandomMode::random_full ? "random_full" : "random_segment";
  j["seed"] = params.seed;
  plan_to_json(j, "v", params.video);
  plan_to_json(j, "a", params.audio);
  plan_to_json(j, "t", params.text);
  return dump(j, options.indent);
}

RandomSpecParams random_params_from_json(std::string_view text) {
  return random_params_from_json(parse_json_text(text, "random config"));
}

RandomSpecParams random_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "", "random config must be a JSON object");
  check_rng_header(j);
  RandomSpecParams params;
  const auto mode = field<std::string>(j, "mode", "config");
  if (mode == "random_full") {
    params.mode = RandomMode::random_full;
  } else if (mode == "random_segment") {
    params.mode = RandomMode::random_segment;
  } else {
    fail(ErrorCode::UnknownMode, "mode", "'" + mode + "'");
  }
  if (j.contains("seed")) params.seed = field<std::uint64_t>(j, "seed", "config");
  params.video = plan_from_json(j, "v");
  params.audio = plan_from_json(j, "a");
  params.text = plan_from_json(j, "t");
  return params;
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  const auto j = parse_json_text(text, path);
  ConfigFile cfg;
  if (j.is_object() && j.contains("mode")) {
    cfg.random = random_params_from_json(j);
  } else {
    cfg.spec = spec_from_json(j);
  }
  return cfg;
}

nlohmann::json to_json(const MediaMeta& meta) {
  json j;
  j["duration_s"] = meta.duration_s;
  j["container"] = meta.container;
  j["has_video"] = meta.has_video;
  j["has_audio"] = meta.has_audio;
  if (meta.has_video) {
    j["fps"] = meta.fps;
    j["width"] = meta.width;
    j["height"] = meta.height;
  }
  if (meta.has_audio) {
    j["sample_rate"] = meta.sample_rate;
    j["channels"] = meta.channels;
  }
  return j;
}

MediaMeta media_meta_from_json(const nlohmann::json& j) {
  MediaMeta m;
  m.duration_s = j.value("duration_s", 0.0);
  m.container = j.value("container", std::string());
  m.has_video = j.value("has_video", false);
  m.has_audio = j.value("has_audio", false);
  m.fps = j.value("fps", 0.0);
  m.width = j.value("width", 0);
  m.height = j.value("height", 0);
  m.sample_rate = j.value("sample_rate", 0);
  m.channels = j.value("channels", 0);
  return m;
}

}  // namespace vna
