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

#include "doctest.h"
#include "support.hpp"
#include "vna/evaluation.hpp"
#include "vna/feature.hpp"

using namespace vna;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

proc::Result vna_run(std::vector<std::string> args) {
  args.insert(args.begin(), VNA_CLI);
  return proc::run(args);
}

fs::path feature_set(const fs::path& dir, std::size_t n) {
  eval::Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    feature::FeatureSeq seq(100, 2);
    const float label = i % 2 ? -1.0f : 1.0f;
    for (std::size_t t = 0; t < 100; ++t) {
      seq.row(t)[0] = label;
      seq.row(t)[1] = static_cast<float>((i + 0.5) / static_cast<double>(n));
    }
    const auto id = "f" + std::to_string(i);
    feature::save(dir / (id + ".vfs"), seq);
    d.instances.push_back({id, dir / (id + ".vfs"), label, i < n / 2 ? "train" : "test", ""});
  }
  eval::save_dataset(dir / "set.json", d);
  return dir / "set.json";
}

}  // namespace

TEST_CASE("gen-config and inject exit codes") {
  const auto dir = test::scratch("cli-inject");
  auto r = vna_run({"gen-config", "--v-noise", "gblur,blank", "--v-num", "2", "--v-ratio", "0.8", "--v-intensity",
                    "0.5", "--seed", "3", "-o", (dir / "cfg.json").string()});
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(test::slurp(dir / "cfg.json"))["v_noise_list"] == json::array({"gblur", "blank"}));

  r = vna_run({"gen-config", "--v-noise", "wobble", "--v-num", "1", "--v-ratio", "0.5", "--v-intensity", "0.5"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("UnknownKind") != std::string::npos);
  CHECK(vna_run({"gen-config", "--mode", "sometimes"}).exit_code == 2);
  CHECK(vna_run({"inject", "--in", "x"}).exit_code == 2);

  test::ClipOptions o;
  o.duration_s = 2.0;
  o.width = 64;
  o.height = 48;
  test::make_clip(dir / "in.mkv", o);
  r = vna_run({"inject", "--in", (dir / "in.mkv").string(), "--out", (dir / "out.mkv").string(), "--config",
               (dir / "cfg.json").string(), "--lossless"});
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out)["frames"] == 50);
  CHECK(media::probe(dir / "out.mkv").has_video);

  test::spit(dir / "bad.json", R"({"seed":1,"items":[{"modality":"video","kind":"gblur","start_s":0,"end_s":1,"intensity":3}]})");
  CHECK(vna_run({"inject", "--in", (dir / "in.mkv").string(), "--out", (dir / "o2.mkv").string(), "--config",
                 (dir / "bad.json").string()})
            .exit_code == 2);
  test::spit(dir / "junk.mp4", "junk");
  CHECK(vna_run({"inject", "--in", (dir / "junk.mp4").string(), "--out", (dir / "o3.mkv").string(), "--config",
                 (dir / "cfg.json").string()})
            .exit_code == 3);

  const char* saved = std::getenv("VNA_FFMPEG");
  const std::string keep = saved ? saved : "";
  ::setenv("VNA_FFMPEG", (dir / "no-such-binary").c_str(), 1);
  r = vna_run({"inject", "--in", (dir / "in.mkv").string(), "--out", (dir / "o4.mkv").string(), "--config",
               (dir / "cfg.json").string()});
  if (saved) ::setenv("VNA_FFMPEG", keep.c_str(), 1);
  else ::unsetenv("VNA_FFMPEG");
  CHECK(r.exit_code == 4);
}

TEST_CASE("sweep, report, and augment") {
  const auto dir = test::scratch("cli-sweep");
  const auto set = feature_set(dir, 10);
  json plan = {{"kind", "structural_drop"},
               {"dataset", "set.json"},
               {"seed", 5},
               {"work_dir", "work"},
               {"predictor",
                {{"name", "feat"},
                 {"stateless", true},
                 {"command", {VNA_STUB_PREDICTOR, "features", "--manifest", "{manifest}", "--out", "{output}"}}}}};
  test::spit(dir / "plan.json", plan.dump());
  auto r = vna_run({"sweep", "--plan", (dir / "plan.json").string(), "--out", (dir / "a.json").string(), "--csv",
                    (dir / "a.csv").string()});
  REQUIRE(r.exit_code == 0);
  plan["kind"] = "random_drop";
  plan["predictor"]["name"] = "feat-random";
  test::spit(dir / "plan2.json", plan.dump());
  REQUIRE(vna_run({"sweep", "--plan", (dir / "plan2.json").string(), "--out", (dir / "b.json").string()}).exit_code == 0);

  const auto a = eval::load_report(dir / "a.json");
  CHECK(a.levels.size() == 10);
  CHECK(a.indicator == "missing_rate");
  CHECK(eval::import_csv(test::slurp(dir / "a.csv")).air == a.air);

  r = vna_run({"report", "--merge", (dir / "a.json").string(), (dir / "b.json").string(), "--svg",
               (dir / "curves.svg").string(), "--json", (dir / "summary.json").string()});
  REQUIRE(r.exit_code == 0);
  const auto svg = test::slurp(dir / "curves.svg");
  CHECK(svg.find("feat-random") != std::string::npos);
  CHECK(json::parse(test::slurp(dir / "summary.json"))["reports"].size() == 2);
  CHECK(vna_run({"report", "--merge", (dir / "a.json").string(), (dir / "b.json").string(), "--csv", "x.csv"})
            .exit_code == 2);

  // A failing predictor maps to exit 5.
  plan["predictor"]["command"] = {VNA_STUB_PREDICTOR, "fail", "--manifest", "{manifest}", "--out", "{output}"};
  test::spit(dir / "plan3.json", plan.dump());
  r = vna_run({"sweep", "--plan", (dir / "plan3.json").string(), "--out", (dir / "c.json").string()});
  CHECK(r.exit_code == 5);
  CHECK(r.err.find("asked to fail") != std::string::npos);

  test::spit(dir / "aug.json",
             R"({"seed":8,"items":[{"modality":"feature","kind":"random_drop","start_s":0,"end_s":100,"intensity":0.5,"params":{"unit":"index"}}]})");
  r = vna_run({"augment", "--manifest", set.string(), "--config", (dir / "aug.json").string(), "--copies", "2",
               "--split", "train", "--out", (dir / "aug").string()});
  REQUIRE(r.exit_code == 0);
  const auto out = eval::load_dataset(dir / "aug/manifest.json");
  CHECK(out.instances.size() == 20);
  CHECK(out.instances[10].id == "f0#0");
  const auto copy = feature::load(out.instances[10].path);
  std::size_t dropped = 0;
  for (auto m : copy.mask) dropped += m == 0;
  CHECK(dropped > 20);
  CHECK(dropped < 80);
}
