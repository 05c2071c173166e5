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

#include "vna/text.hpp"

#include <cmath>
#include <fstream>

#include "vna/error.hpp"
#include "vna/rng.hpp"

namespace vna::text {

namespace {

using nlohmann::json;

void check_range(const Transcript& t, WordRange range) {
  if (range.first > range.last || range.last > t.words.size()) {
    throw Error(ErrorCode::RangeOutOfBounds,
                "word range [" + std::to_string(range.first) + ", " + std::to_string(range.last) +
                    ") over " + std::to_string(t.words.size()) + " words");
  }
}

void check_intensity(double intensity) {
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw Error(ErrorCode::BadIntensity, "intensity " + std::to_string(intensity));
  }
}

std::optional<double> optional_time(const json& w, const char* key, std::size_t i) {
  if (!w.contains(key) || w[key].is_null()) return std::nullopt;
  if (!w[key].is_number()) {
    throw Error(ErrorCode::ParseError, "words[" + std::to_string(i) + "]." + key + ": number required");
  }
  return w[key].get<double>();
}

// Keeps token/start/end order stable on disk.
nlohmann::ordered_json ordered_json_of(const Transcript& t) {
  nlohmann::ordered_json j;
  j["language"] = t.language;
  j["words"] = nlohmann::ordered_json::array();
  for (const auto& w : t.words) {
    nlohmann::ordered_json o;
    o["token"] = w.token;
    if (w.start_s) o["start_s"] = *w.start_s;
    if (w.end_s) o["end_s"] = *w.end_s;
    j["words"].push_back(std::move(o));
  }
  return j;
}

}  // namespace

void check_transcript(const Transcript& t) {
  std::optional<double> prev_end;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    const auto& w = t.words[i];
    const auto where = "words[" + std::to_string(i) + "]";
    if (w.start_s && w.end_s && *w.end_s < *w.start_s) {
      throw Error(ErrorCode::ParseError, where + ": end before start");
    }
    if (w.start_s && prev_end && *w.start_s < *prev_end) {
      throw Error(ErrorCode::ParseError, where + ": overlaps the previous word");
    }
    if (w.end_s) {
      prev_end = w.end_s;
    } else if (w.start_s) {
      prev_end = w.start_s;
    }
  }
}

Transcript transcript_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("words") || !j["words"].is_array()) {
    throw Error(ErrorCode::ParseError, "transcript: object with a 'words' array required");
  }
  Transcript t;
  if (j.contains("language")) {
    if (!j["language"].is_string()) throw Error(ErrorCode::ParseError, "language: string required");
    t.language = j["language"].get<std::string>();
  }
  const auto& words = j["words"];
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (!w.is_object() || !w.contains("token") || !w["token"].is_string()) {
      throw Error(ErrorCode::ParseError, "words[" + std::to_string(i) + "].token: string required");
    }
    t.words.push_back({w["token"].get<std::string>(), optional_time(w, "start_s", i),
                       optional_time(w, "end_s", i)});
  }
  check_transcript(t);
  return t;
}

Transcript transcript_from_json(std::string_view text) {
  return transcript_from_json(parse_json_text(text, "transcript"));
}

nlohmann::json to_json(const Transcript& t) { return json::parse(ordered_json_of(t).dump()); }

Transcript load_asr_variant(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open transcript " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return transcript_from_json(parse_json_text(text, path.string()));
}

void save_transcript(const std::filesystem::path& path, const Transcript& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << ordered_json_of(t).dump(2) << '\n';
}

Transcript erase_words(const Transcript& t, WordRange range, double intensity, std::uint64_t seed) {
  check_range(t, range);
  check_intensity(intensity);
  const CounterRng rng(seed);
  Transcript out;
  out.language = t.language;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    const bool in_range = i >= range.first && i < range.last;
    if (in_range && rng.uniform(i) < intensity) continue;
    out.words.push_back(t.words[i]);
  }
  return out;
}

Transcript replace_words(const Transcript& t, WordRange range, double intensity, std::uint64_t seed,
                         const std::vector<std::string>* lexicon) {
  check_range(t, range);
  check_intensity(intensity);
  if (lexicon != nullptr && lexicon->empty()) throw Error(ErrorCode::EmptyLexicon, "lexicon is empty");
  const CounterRng select(seed);
  const CounterRng pick(derive_seed(seed, 1));
  Transcript out = t;
  for (std::size_t i = range.first; i < range.last; ++i) {
    if (!(select.uniform(i) < intensity)) continue;
    out.words[i].token = lexicon != nullptr ? (*lexicon)[pick.below(i, lexicon->size())]
                                            : std::string(kUnknownToken);
  }
  return out;
}

WordRange words_in_span(const Transcript& t, double start_s, double end_s) {
  WordRange range{t.words.size(), t.words.size()};
  bool found = false;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    const auto& w = t.words[i];
    if (!w.start_s || !w.end_s) {
      throw Error(ErrorCode::MissingWordTimes,
                  "words[" + std::to_string(i) + "] has no times; address text noise by index instead");
    }
    const double mid = 0.5 * (*w.start_s + *w.end_s);
    if (mid >= start_s && mid < end_s) {
      if (!found) range.first = i;
      range.last = i + 1;
      found = true;
    }
  }
  if (!found) range.first = range.last = 0;
  return range;
}

Transcript apply_item(const Transcript& t, const NoiseItem& item, std::uint64_t item_seed) {
  if (item.kind == NoiseKind::asr_variant) {
    return load_asr_variant(item.params.at("path").get<std::string>());
  }
  WordRange range;
  if (item.index_addressed()) {
    range.first = static_cast<std::size_t>(std::llround(item.start_s));
    range.last = static_cast<std::size_t>(std::llround(item.end_s));
  } else {
    range = words_in_span(t, item.start_s, item.end_s);
  }
  switch (item.kind) {
    case NoiseKind::erase: return erase_words(t, range, item.intensity, item_seed);
    case NoiseKind::replace: {
      if (item.params.is_object() && item.params.contains("lexicon")) {
        const auto lexicon = item.params["lexicon"].get<std::vector<std::string>>();
        return replace_words(t, range, item.intensity, item_seed, &lexicon);
      }
      return replace_words(t, range, item.intensity, item_seed);
    }
    default:
      throw Error(ErrorCode::UnknownKind, "'" + std::string(name_of(item.kind)) + "' is not a text kind");
  }
}

}  // namespace vna::text
