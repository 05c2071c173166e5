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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vna/error.hpp"
#include "vna/text.hpp"

using namespace vna;
using namespace vna::text;

namespace {

Transcript numbered(std::size_t n, bool timed = true) {
  Transcript t;
  t.language = "en";
  for (std::size_t i = 0; i < n; ++i) {
    Word w{"w" + std::to_string(i), std::nullopt, std::nullopt};
    if (timed) {
      w.start_s = 0.5 * static_cast<double>(i);
      w.end_s = 0.5 * static_cast<double>(i) + 0.4;
    }
    t.words.push_back(w);
  }
  return t;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("erase words") {
  const auto t = numbered(1000);
  CHECK(erase_words(t, {0, 1000}, 0.0, 1) == t);
  CHECK(erase_words(t, {100, 200}, 1.0, 1).words.size() == 900);

  const auto e = erase_words(t, {0, 1000}, 0.3, 17);
  const double removed = 1000.0 - static_cast<double>(e.words.size());
  CHECK(std::abs(removed - 300.0) <= 45.0);
  // Order preserved: surviving tokens are a subsequence.
  std::size_t j = 0;
  for (const auto& w : e.words) {
    while (j < t.words.size() && t.words[j].token != w.token) ++j;
    REQUIRE(j < t.words.size());
  }
  CHECK(erase_words(t, {0, 1000}, 0.3, 17) == e);

  const auto part = erase_words(t, {10, 20}, 1.0, 2);
  CHECK(part.words[9].token == "w9");
  CHECK(part.words[10].token == "w20");
  CHECK(code_of([&] { erase_words(t, {10, 1001}, 0.5, 1); }) == ErrorCode::RangeOutOfBounds);
}

TEST_CASE("replace words") {
  const auto t = numbered(50);
  CHECK(replace_words(t, {0, 50}, 0.0, 1) == t);
  const auto all = replace_words(t, {5, 15}, 1.0, 1);
  REQUIRE(all.words.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(all.words[i].start_s == t.words[i].start_s);
    if (i >= 5 && i < 15) {
      CHECK(all.words[i].token == "[UNK]");
    } else {
      CHECK(all.words[i].token == t.words[i].token);
    }
  }
  const std::vector<std::string> lex = {"alpha", "beta", "gamma"};
  const auto r = replace_words(t, {0, 50}, 1.0, 3, &lex);
  for (const auto& w : r.words) CHECK(std::find(lex.begin(), lex.end(), w.token) != lex.end());
  const std::vector<std::string> empty;
  CHECK(code_of([&] { replace_words(t, {0, 5}, 0.5, 1, &empty); }) == ErrorCode::EmptyLexicon);
}

TEST_CASE("transcript JSON") {
  const auto dir = test::scratch("text-json");
  test::spit(dir / "ok.json", R"({"language":"en","words":[{"token":"a","start_s":0.0,"end_s":0.2},
      {"token":"b"},{"token":"c","start_s":0.5,"end_s":0.9}]})");
  const auto t = load_asr_variant(dir / "ok.json");
  CHECK(t.words.size() == 3);
  CHECK_FALSE(t.words[1].start_s);
  save_transcript(dir / "again.json", t);
  CHECK(load_asr_variant(dir / "again.json") == t);

  test::spit(dir / "bad.json", R"({"words":[{"token":"a",)");
  CHECK(code_of([&] { load_asr_variant(dir / "bad.json"); }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          transcript_from_json(std::string_view(
              R"({"words":[{"token":"a","start_s":0,"end_s":1},{"token":"b","start_s":0.5,"end_s":1.5}]})"));
        }) == ErrorCode::ParseError);
  CHECK(transcript_from_json(std::string_view(R"({"words":[]})")).words.empty());
}

TEST_CASE("time-addressed text items use word midpoints") {
  const auto t = numbered(10);  // word i spans [0.5i, 0.5i + 0.4)
  const auto r = words_in_span(t, 1.0, 2.0);
  CHECK(r.first == 2);
  CHECK(r.last == 4);
  CHECK(code_of([] { words_in_span(numbered(3, false), 0, 1); }) == ErrorCode::MissingWordTimes);

  NoiseItem it;
  it.modality = Modality::text;
  it.kind = NoiseKind::replace;
  it.start_s = 1.0;
  it.end_s = 2.0;
  it.intensity = 1.0;
  const auto out = apply_item(t, it, 5);
  CHECK(out.words[1].token == "w1");
  CHECK(out.words[2].token == "[UNK]");
  CHECK(out.words[3].token == "[UNK]");
  CHECK(out.words[4].token == "w4");
}
