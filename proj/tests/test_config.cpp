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
#include <set>

#include "doctest.h"
#include "vna/config.hpp"
#include "vna/error.hpp"
#include "vna/rng.hpp"

using namespace vna;

namespace {

MediaMeta clip(double duration = 10.0) {
  MediaMeta m;
  m.duration_s = duration;
  m.fps = 25;
  m.width = 640;
  m.height = 480;
  m.sample_rate = 16000;
  m.channels = 1;
  m.container = "matroska";
  m.has_video = m.has_audio = true;
  return m;
}

NoiseItem item(Modality m, NoiseKind k, double a, double b, double s) {
  NoiseItem it;
  it.modality = m;
  it.kind = k;
  it.start_s = a;
  it.end_s = b;
  it.intensity = s;
  return it;
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

RandomSpecParams reference_recipe(std::uint64_t seed) {
  RandomSpecParams p;
  p.seed = seed;
  p.video = {{"gblur", "blank"}, 2, 0.8, 0.5};
  p.audio = {{"reverb"}, 1, 1.0, 0.3};
  return p;
}

}  // namespace

TEST_CASE("kind registry") {
  CHECK(kind_registry().size() == 29);
  for (const auto& info : kind_registry()) {
    const auto k = find_kind(info.name);
    REQUIRE(k);
    CHECK(name_of(*k) == info.name);
  }
  CHECK(find_kind("reverb") == NoiseKind::reverb_hall);
  CHECK_FALSE(find_kind("sparkle"));
  CHECK(modality_of(NoiseKind::structural_drop) == Modality::feature);
}

TEST_CASE("validate clamps and rejects") {
  NoiseSpec s;
  s.items.push_back(item(Modality::video, NoiseKind::gblur, 0, 3, 0.5));
  auto v = validate(s, clip());
  REQUIRE(v.spec().items.size() == 1);
  CHECK(v.spec().items[0].start_s == 0.0);
  CHECK(v.spec().items[0].end_s == 3.0);
  CHECK(v.spec().clip_duration_s == 10.0);

  s.items[0] = item(Modality::video, NoiseKind::gblur, 8, 15, 0.5);
  v = validate(s, clip());
  CHECK(v.spec().items[0].start_s == 8.0);
  CHECK(v.spec().items[0].end_s == 10.0);

  s.items[0] = item(Modality::video, NoiseKind::gblur, 11, 15, 0.5);
  CHECK(code_of([&] { validate(s, clip()); }) == ErrorCode::EmptyInterval);

  s.items[0] = item(Modality::video, NoiseKind::gblur, 1, 2, 1.5);
  CHECK(code_of([&] { validate(s, clip()); }) == ErrorCode::BadIntensity);

  s.items[0] = item(Modality::audio, NoiseKind::gblur, 1, 2, 0.5);
  CHECK(code_of([&] { validate(s, clip()); }) == ErrorCode::UnknownKind);

  s.items[0] = item(Modality::video, NoiseKind::occlude, 1, 2, 0.5);
  s.items[0].params = {{"x", 600}, {"y", 0}, {"w", 100}, {"h", 10}};
  CHECK(code_of([&] { validate(s, clip()); }) == ErrorCode::BoxOutOfBounds);

  s.items[0] = item(Modality::video, NoiseKind::channel_swap, 1, 2, 1);
  s.items[0].params = {{"order", "RGR"}};
  CHECK(code_of([&] { validate(s, clip()); }) == ErrorCode::BadPermutation);
}

TEST_CASE("validate sorts by modality then start and keeps list order for ties") {
  NoiseSpec s;
  s.items.push_back(item(Modality::video, NoiseKind::gblur, 5, 6, 0.5));
  s.items.push_back(item(Modality::audio, NoiseKind::mute, 2, 3, 1));
  s.items.push_back(item(Modality::video, NoiseKind::blank, 1, 2, 1));
  s.items.push_back(item(Modality::video, NoiseKind::invert, 1, 3, 1));
  const auto v = validate(s, clip());
  const auto& it = v.spec().items;
  CHECK(it[0].modality == Modality::audio);
  CHECK(it[1].kind == NoiseKind::blank);
  CHECK(it[2].kind == NoiseKind::invert);
  CHECK(it[3].kind == NoiseKind::gblur);
}

TEST_CASE("unknown kind in JSON names the item path") {
  const std::string text = R"({"seed":1,"items":[{"modality":"video","kind":"gblur","start_s":0,"end_s":1,"intensity":0.1},
    {"modality":"audio","kind":"sparkle","start_s":0,"end_s":1,"intensity":0.1}]})";
  try {
    spec_from_json(text);
    FAIL("expected UnknownKind");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKind);
    CHECK(std::string(e.what()).find("items[1]") != std::string::npos);
  }
}

TEST_CASE("JSON canonical form and errors") {
  CHECK(to_json(NoiseSpec{}) == R"({"seed":0,"items":[]})");
  CHECK(spec_from_json(R"({"seed":0,"items":[]})") == NoiseSpec{});
  CHECK(code_of([] {
          spec_from_json(R"({"seed":0,"items":[{"modality":"video","kind":"gblur","start_s":0,"end_s":1,"intensity":1.5}]})");
        }) == ErrorCode::BadIntensity);
  try {
    spec_from_json("{\"seed\": 0,\n \"items\": [,]}");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  const auto with_header = to_json(NoiseSpec{}, {.header = true});
  CHECK(with_header.find(std::string(kRngAlgorithm)) != std::string::npos);
  CHECK(spec_from_json(with_header) == NoiseSpec{});
  CHECK(code_of([] { spec_from_json(R"({"rng":"mt19937/0","seed":0,"items":[]})"); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("reference recipe layout") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto spec = generate_random(reference_recipe(seed), clip());
    std::vector<NoiseItem> video, audio;
    for (const auto& it : spec.items) (it.modality == Modality::video ? video : audio).push_back(it);
    REQUIRE(video.size() == 2);
    REQUIRE(audio.size() == 1);
    double covered = 0;
    for (const auto& it : video) {
      CHECK((it.kind == NoiseKind::gblur || it.kind == NoiseKind::blank));
      CHECK(it.intensity == 0.5);
      CHECK(it.end_s > it.start_s);
      CHECK(it.start_s >= 0.0);
      CHECK(it.end_s <= 10.0);
      covered += it.end_s - it.start_s;
    }
    CHECK(covered == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(video[0].end_s <= video[1].start_s);
    CHECK(audio[0].kind == NoiseKind::reverb_hall);
    CHECK(audio[0].start_s == 0.0);
    CHECK(audio[0].end_s == 10.0);
    CHECK(audio[0].intensity == 0.3);
  }
}

TEST_CASE("random layout edge cases") {
  RandomSpecParams p;
  CHECK(generate_random(p, clip()).items.empty());

  p.video = {{"gblur"}, 1, 1.0, 0.4};
  const auto one = generate_random(p, clip());
  REQUIRE(one.items.size() == 1);
  CHECK(one.items[0].start_s == 0.0);
  CHECK(one.items[0].end_s == 10.0);

  p.video = {{"gblur"}, 300, 1.0, 0.4};  // 300 segments, 250 frames
  CHECK(code_of([&] { generate_random(p, clip()); }) == ErrorCode::InfeasibleLayout);

  p.video = {{"gblur"}, 1, 0.5, 0.4};
  p.mode = RandomMode::random_segment;
  CHECK(code_of([&] { generate_random(p, clip()); }) == ErrorCode::UnknownMode);
}

TEST_CASE("layout invariants over randomized params") {
  SequentialRng rng(7);
  const char* kinds[] = {"gblur", "blank", "impulse", "occlude"};
  for (int trial = 0; trial < 300; ++trial) {
    RandomSpecParams p;
    p.seed = rng.below(1u << 30);
    const double duration = 1.0 + rng.uniform() * 20.0;
    p.video.noise_list = {kinds[rng.below(4)], kinds[rng.below(4)]};
    p.video.noise_num = 1 + static_cast<int>(rng.below(6));
    p.video.noise_ratio = rng.uniform();
    p.video.noise_intensity = rng.uniform();
    p.audio = {{"mute", "color_pink"}, 1 + static_cast<int>(rng.below(4)), rng.uniform(), rng.uniform()};
    const auto meta = clip(duration);
    NoiseSpec spec;
    try {
      spec = generate_random(p, meta);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleLayout);
      continue;
    }
    for (Modality m : {Modality::video, Modality::audio}) {
      const double rate = m == Modality::video ? meta.fps : meta.sample_rate;
      const auto& plan = m == Modality::video ? p.video : p.audio;
      std::vector<NoiseItem> items;
      for (const auto& it : spec.items) {
        if (it.modality == m) items.push_back(it);
      }
      REQUIRE(items.size() == static_cast<std::size_t>(plan.noise_num));
      double covered = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        covered += items[i].end_s - items[i].start_s;
        if (i > 0) CHECK(items[i - 1].end_s <= items[i].start_s + 1e-12);
      }
      const double target = std::round(plan.noise_ratio * std::round(duration * rate)) / rate;
      CHECK(std::abs(covered - target) <= 1.0 / rate);
    }
    // Byte-stable.
    CHECK(to_json(generate_random(p, meta)) == to_json(spec));
    // Round trip.
    CHECK(spec_from_json(to_json(spec)) == spec);
  }
}

TEST_CASE("JSON round trip over randomized explicit specs") {
  SequentialRng rng(11);
  const auto registry = kind_registry();
  for (int trial = 0; trial < 500; ++trial) {
    NoiseSpec s;
    s.seed = rng.below(~0ULL);
    const int n = static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      const auto& info = registry[rng.below(registry.size())];
      const double a = rng.uniform() * 100.0;
      auto it = item(info.modality, *find_kind(info.name), a, a + 1e-3 + rng.uniform() * 50.0, rng.uniform());
      if (rng.uniform() < 0.3) it.params = {{"unit", "index"}, {"note", "x"}};
      s.items.push_back(it);
    }
    const auto text = to_json(s);
    const auto back = spec_from_json(text);
    CHECK(back == s);
    CHECK(to_json(back) == text);
  }
}

TEST_CASE("random params JSON field names") {
  const auto p = reference_recipe(42);
  const auto text = to_json(p);
  for (const char* key : {"\"mode\"", "\"v_noise_list\"", "\"v_noise_num\"", "\"v_noise_ratio\"",
                          "\"v_noise_intensity\"", "\"a_noise_list\"", "\"a_noise_intensity\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
  CHECK(random_params_from_json(text) == p);
}
