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

#ifndef VNA_TEXT_HPP
#define VNA_TEXT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vna/config.hpp"

namespace vna::text {

inline constexpr std::string_view kUnknownToken = "[UNK]";

struct Word {
  std::string token;
  std::optional<double> start_s;
  std::optional<double> end_s;

  bool operator==(const Word&) const = default;
};

struct Transcript {
  std::vector<Word> words;
  std::string language;

  bool operator==(const Transcript&) const = default;
};

/// Half-open word index interval.
struct WordRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Throws ParseError if word times are decreasing or overlapping.
void check_transcript(const Transcript& t);

Transcript transcript_from_json(const nlohmann::json& j);
Transcript transcript_from_json(std::string_view text);
inline Transcript transcript_from_json(const std::string& text) { return transcript_from_json(std::string_view(text)); }
inline Transcript transcript_from_json(const char* text) { return transcript_from_json(std::string_view(text)); }
nlohmann::json to_json(const Transcript& t);

/// Reads an externally produced (e.g. ASR) transcript file.
Transcript load_asr_variant(const std::filesystem::path& path);
void save_transcript(const std::filesystem::path& path, const Transcript& t);

/// Each in-range word is dropped independently with probability `intensity`.
Transcript erase_words(const Transcript& t, WordRange range, double intensity, std::uint64_t seed);

/// Each in-range word is replaced with probability `intensity`, by a uniform
/// draw from `lexicon` or by kUnknownToken when no lexicon is given.
Transcript replace_words(const Transcript& t, WordRange range, double intensity, std::uint64_t seed,
                         const std::vector<std::string>* lexicon = nullptr);

/// Words whose time midpoint lies in [start_s, end_s). Requires word times.
WordRange words_in_span(const Transcript& t, double start_s, double end_s);

/// Applies one validated text item.
Transcript apply_item(const Transcript& t, const NoiseItem& item, std::uint64_t item_seed);

}  // namespace vna::text

#endif  // VNA_TEXT_HPP
