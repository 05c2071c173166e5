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

// Command-line front end.
//
// Exit codes: 0 ok, 1 other failure, 2 bad config or arguments, 3 media
// error, 4 transcoder missing, 5 predictor or evaluation failure.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "vna/audio_io.hpp"
#include "vna/config.hpp"
#include "vna/error.hpp"
#include "vna/evaluation.hpp"
#include "vna/media_io.hpp"
#include "vna/service.hpp"
#include "vna/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code(vna::ErrorCode code) {
  using vna::ErrorCode;
  switch (code) {
    case ErrorCode::TranscoderMissing:
      return 4;
    case ErrorCode::UnreadableMedia:
    case ErrorCode::PipeProtocolError:
    case ErrorCode::EncodeError:
    case ErrorCode::AssetNotFound:
    case ErrorCode::AssetDecodeError:
      return 3;
    case ErrorCode::PredictorFailure:
    case ErrorCode::MissingLevel:
    case ErrorCode::EmptyLevel:
      return 5;
    case ErrorCode::Io:
    case ErrorCode::NotFound:
    case ErrorCode::NotGenerated:
    case ErrorCode::GenerationFailed:
      return 1;
    default:
      return 2;
  }
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << s;
  if (!os) throw vna::Error(vna::ErrorCode::Io, "cannot write " + p.string());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

struct PlanArgs {
  std::string list;
  int num = 0;
  double ratio = 0.0;
  double intensity = 0.0;

  void add(CLI::App* cmd, const std::string& p, const std::string& what) {
    cmd->add_option("--" + p + "-noise", list, what + " noise kinds, comma separated");
    cmd->add_option("--" + p + "-num", num, what + " item count");
    cmd->add_option("--" + p + "-ratio", ratio, "fraction of the clip covered by " + what + " items");
    cmd->add_option("--" + p + "-intensity", intensity, what + " item intensity");
  }
  vna::ModalityPlan plan() const { return {split_list(list), num, ratio, intensity}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vna: multimodal noise injection and robustness evaluation"};
  app.require_subcommand(1);

  // gen-config
  auto* gen = app.add_subcommand("gen-config", "write a random-generation recipe or a concrete spec");
  std::string mode = "random_full";
  std::uint64_t seed = 0;
  PlanArgs va, aa, ta;
  std::optional<double> duration;
  std::string gen_media, gen_out;
  gen->add_option("--mode", mode, "random_full");
  gen->add_option("--seed", seed);
  va.add(gen, "v", "video");
  aa.add(gen, "a", "audio");
  ta.add(gen, "t", "text");
  gen->add_option("--duration", duration, "expand into a concrete spec for a clip of this length");
  gen->add_option("--media", gen_media, "expand into a concrete spec for this file");
  gen->add_option("-o,--out", gen_out, "output path (stdout when omitted)");

  // inject
  auto* inj = app.add_subcommand("inject", "apply a config to a media file");
  std::string in_path, out_path, cfg_path, transcript_path, assets_path, taps_dir, report_path;
  bool lossless = false;
  inj->add_option("--in", in_path)->required();
  inj->add_option("--out", out_path)->required();
  inj->add_option("--config", cfg_path)->required();
  inj->add_option("--transcript", transcript_path, "word-aligned transcript for text items");
  inj->add_option("--assets", assets_path, "asset library manifest");
  inj->add_option("--taps", taps_dir, "write intermediate buffers here");
  inj->add_option("--report", report_path, "write the injection report JSON here");
  inj->add_flag("--lossless", lossless, "ffv1 + pcm_f32le; needs .mkv/.mka/.nut");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a robustness sweep");
  std::string plan_path, sweep_out, sweep_csv, sweep_svg;
  sweep->add_option("--plan", plan_path)->required();
  sweep->add_option("--out", sweep_out)->required();
  sweep->add_option("--csv", sweep_csv);
  sweep->add_option("--svg", sweep_svg);

  // report
  auto* rep = app.add_subcommand("report", "summarize and plot sweep reports");
  std::vector<std::string> merge;
  std::string rep_svg, rep_csv, rep_json, metric = "acc2";
  rep->add_option("--merge,reports", merge)->required();
  rep->add_option("--svg", rep_svg);
  rep->add_option("--csv", rep_csv, "curve CSV (single report only)");
  rep->add_option("--json", rep_json, "merged summary JSON");
  rep->add_option("--metric", metric)->check(CLI::IsMember({"acc2", "f1"}));

  // augment
  auto* aug = app.add_subcommand("augment", "write noised copies of a training manifest");
  std::string aug_manifest, aug_cfg, aug_out, aug_out_manifest, aug_split, aug_assets;
  int copies = 1;
  bool aug_lossy = false;
  aug->add_option("--manifest", aug_manifest)->required();
  aug->add_option("--config", aug_cfg)->required();
  aug->add_option("--copies", copies)->check(CLI::NonNegativeNumber);
  aug->add_option("--out", aug_out, "directory for copies (default <manifest dir>/augmented)");
  aug->add_option("--out-manifest", aug_out_manifest, "default <out>/manifest.json");
  aug->add_option("--split", aug_split);
  aug->add_option("--assets", aug_assets);
  aug->add_flag("--lossy", aug_lossy, "keep the source container instead of lossless .mkv");

  // serve
  auto* srv = app.add_subcommand("serve", "run the analysis backend");
  int port = 8080;
  std::string host = "127.0.0.1", data_dir = "vna-data", predictors, static_dir, srv_assets;
  unsigned workers = 1;
  srv->add_option("--port", port);
  srv->add_option("--host", host);
  srv->add_option("--data", data_dir);
  srv->add_option("--predictors", predictors, "predictor registry JSON");
  srv->add_option("--static", static_dir, "directory served under /");
  srv->add_option("--assets", srv_assets);
  srv->add_option("--workers", workers)->check(CLI::PositiveNumber);

  // probe
  auto* prb = app.add_subcommand("probe", "print media metadata");
  std::string probe_path;
  prb->add_option("path", probe_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      vna::RandomSpecParams params;
      if (mode == "random_full") {
        params.mode = vna::RandomMode::random_full;
      } else if (mode == "random_segment") {
        params.mode = vna::RandomMode::random_segment;
      } else {
        throw vna::Error(vna::ErrorCode::UnknownMode, "'" + mode + "'");
      }
      params.seed = seed;
      params.video = va.plan();
      params.audio = aa.plan();
      params.text = ta.plan();
      vna::MediaMeta meta;
      if (!gen_media.empty()) {
        meta = vna::media::probe(gen_media);
      } else {
        meta.duration_s = duration.value_or(10.0);
        meta.has_video = meta.has_audio = true;
      }
      // Always expand once so bad kinds or infeasible layouts fail here.
      const auto spec = vna::generate_random(params, meta);
      const bool concrete = duration || !gen_media.empty();
      const auto text = concrete ? vna::to_json(spec, {.header = true, .indent = 2})
                                 : vna::to_json(params, {.header = true, .indent = 2});
      if (gen_out.empty()) {
        std::cout << text << "\n";
      } else {
        write_text(gen_out, text + "\n");
      }
      return 0;
    }

    if (*inj) {
      const auto cfg = vna::load_config_file(cfg_path);
      const auto meta = vna::media::probe(in_path);
      const auto spec = cfg.spec ? *cfg.spec : vna::generate_random(*cfg.random, meta);
      const auto vs = vna::validate(spec, meta);
      vna::media::InjectOptions opt;
      opt.lossless = lossless;
      if (!transcript_path.empty()) opt.transcript = vna::text::load_asr_variant(transcript_path);
      if (!taps_dir.empty()) opt.tap_dir = taps_dir;
      std::unique_ptr<vna::audio::AssetLibrary> assets;
      if (!assets_path.empty()) {
        assets = std::make_unique<vna::audio::AssetLibrary>(fs::path(assets_path));
        vna::media::install_decoder(*assets);
        opt.assets = assets.get();
      }
      const auto report = vna::media::inject(in_path, out_path, vs, opt);
      const auto j = vna::media::to_json(report).dump(2);
      if (report_path.empty()) {
        std::cout << j << "\n";
      } else {
        write_text(report_path, j + "\n");
      }
      return 0;
    }

    if (*sweep) {
      const auto plan = vna::eval::load_plan(plan_path);
      const auto report = vna::eval::run_sweep(plan);
      write_text(sweep_out, vna::eval::to_json(report).dump(2) + "\n");
      if (!sweep_csv.empty()) vna::eval::export_curves(report, vna::eval::CurveFormat::csv, sweep_csv);
      if (!sweep_svg.empty()) vna::eval::export_curves(report, vna::eval::CurveFormat::svg, sweep_svg);
      std::fprintf(stderr, "%s: AIR acc2 %.4f f1 %.4f over %zu levels\n", report.label().c_str(), report.air.acc2,
                   report.air.f1, report.levels.size());
      return 0;
    }

    if (*rep) {
      std::vector<vna::eval::RobustnessReport> reports;
      for (const auto& p : merge) {
        auto r = vna::eval::load_report(p);
        vna::eval::finalize(r);
        reports.push_back(std::move(r));
      }
      if (!rep_csv.empty()) {
        if (reports.size() != 1) throw vna::Error(vna::ErrorCode::ParseError, "--csv takes exactly one report");
        write_text(rep_csv, vna::eval::export_csv(reports.front()));
      }
      if (!rep_svg.empty()) {
        write_text(rep_svg, vna::eval::export_svg(reports, metric == "f1" ? vna::eval::CurveMetric::f1
                                                                          : vna::eval::CurveMetric::acc2));
      }
      json summary = json::array();
      for (const auto& r : reports) {
        std::printf("%-40s acc2 %.4f  f1 %.4f\n", r.label().c_str(), r.air.acc2, r.air.f1);
        summary.push_back({{"label", r.label()},
                           {"predictor", r.predictor},
                           {"kind", r.kind},
                           {"air", {{"acc2", r.air.acc2}, {"f1", r.air.f1}}},
                           {"air_area", {{"acc2", r.air_area.acc2}, {"f1", r.air_area.f1}}}});
      }
      if (!rep_json.empty()) write_text(rep_json, json{{"reports", summary}}.dump(2) + "\n");
      return 0;
    }

    if (*aug) {
      const auto ds = vna::eval::load_dataset(aug_manifest);
      const auto cfg = vna::load_config_file(aug_cfg);
      vna::eval::AugmentOptions opt;
      opt.copies = copies;
      opt.out_dir = aug_out.empty() ? fs::path(aug_manifest).parent_path() / "augmented" : fs::path(aug_out);
      opt.lossless = !aug_lossy;
      if (!aug_split.empty()) opt.split = aug_split;
      if (!aug_assets.empty()) opt.assets = aug_assets;
      const auto out = vna::eval::augment(ds, cfg, opt);
      const fs::path manifest = aug_out_manifest.empty() ? opt.out_dir / "manifest.json" : fs::path(aug_out_manifest);
      vna::eval::save_dataset(manifest, out);
      std::fprintf(stderr, "wrote %zu instances to %s\n", out.instances.size(), manifest.c_str());
      return 0;
    }

    if (*srv) {
      vna::service::ServiceOptions opt;
      opt.data_dir = data_dir;
      opt.workers = workers;
      if (!predictors.empty()) opt.predictors = vna::service::load_predictor_registry(predictors);
      if (!static_dir.empty()) opt.static_dir = static_dir;
      if (!srv_assets.empty()) opt.assets = srv_assets;
      vna::service::Service service(opt);
      httplib::Server server;
      service.mount(server);
      static httplib::Server* active = &server;
      std::signal(SIGINT, [](int) {
        active->stop();
      });
      std::signal(SIGTERM, [](int) {
        active->stop();
      });
      if (!server.bind_to_port(host, port)) throw vna::Error(vna::ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
      std::fprintf(stderr, "listening on http://%s:%d\n", host.c_str(), port);
      server.listen_after_bind();
      return 0;
    }

    if (*prb) {
      std::cout << vna::to_json(vna::media::probe(probe_path)).dump(2) << "\n";
      return 0;
    }
  } catch (const vna::Error& e) {
    std::fprintf(stderr, "vna: %s\n", e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vna: %s\n", e.what());
    return 1;
  }
  return 1;
}
