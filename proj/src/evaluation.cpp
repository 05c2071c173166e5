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

#include "vna/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vna/audio_io.hpp"
#include "vna/error.hpp"
#include "vna/feature.hpp"
#include "vna/media_io.hpp"
#include "vna/rng.hpp"
#include "vna/subprocess.hpp"
#include "vna/text.hpp"

namespace vna::eval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& p, ErrorCode code) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(code, "cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + p.string());
  os << text;
  if (!os) throw Error(ErrorCode::Io, "short write to " + p.string());
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Lines of a CSV file with 1-based numbers, blank lines dropped.
std::vector<std::pair<std::size_t, std::string>> csv_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t n = 0, pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    ++n;
    auto line = trim(text.substr(pos, next - pos));
    if (!line.empty()) out.emplace_back(n, std::move(line));
    pos = next + 1;
  }
  return out;
}

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  if (s != id || s.empty() || s[0] == '.') {
    char buf[20];
    std::snprintf(buf, sizeof buf, "-%08llx", static_cast<unsigned long long>(hash_string(id) & 0xffffffffULL));
    s += buf;
  }
  return s;
}

template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  if (n == 0) return;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= n) return;
      {
        std::lock_guard lock(mutex);
        if (error) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
  }
  if (error) std::rethrow_exception(error);
}

std::unique_ptr<audio::AssetLibrary> make_assets(const std::optional<fs::path>& manifest) {
  auto lib = manifest ? std::make_unique<audio::AssetLibrary>(*manifest) : std::make_unique<audio::AssetLibrary>();
  media::install_decoder(*lib);
  return lib;
}

[[noreturn]] void predictor_failure(const std::string& what) { throw Error(ErrorCode::PredictorFailure, what); }

std::string modality_for(const Instance& inst) {
  if (!inst.modality.empty()) return inst.modality;
  const auto ext = inst.path.extension().string();
  if (ext == ".vfs") return "feature";
  if (ext == ".json") return "text";
  return "media";
}

}  // namespace

// ---------------------------------------------------------------------------
// Levels and aggregation

std::vector<double> default_points(const Interval& iv) {
  if (!(iv.min < iv.max) || !std::isfinite(iv.min) || !std::isfinite(iv.max)) {
    throw Error(ErrorCode::BadInterval, "interval needs min < max, got [" + fmt17(iv.min) + ", " + fmt17(iv.max) + "]");
  }
  std::vector<double> pts(10);
  for (int k = 1; k <= 10; ++k) pts[k - 1] = iv.min + k * (iv.max - iv.min) / 11.0;
  return pts;
}

IndicatorInfo indicator_for(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::random_drop:
    case NoiseKind::structural_drop:
      return {"missing_rate", {0.0, 1.0, 0.1}, 1.0};
    case NoiseKind::gblur:
      return {"sigma", {0.0, 10.0, 1.0}, 0.1};
    case NoiseKind::impulse:
      return {"strength", {0.0, 100.0, 10.0}, 0.01};
    case NoiseKind::color_white:
      return {"amplitude", {0.0, 0.1, 0.01}, 1.0};
    case NoiseKind::bg_mix:
      return {"amplitude", {0.0, 1.0, 0.1}, 1.0};
    default:
      return {"intensity", {0.0, 1.0, 0.1}, 1.0};
  }
}

double air(const std::map<double, double>& metric_at, std::span<const double> points, const Interval& iv,
           bool normalize) {
  if (points.empty()) throw Error(ErrorCode::MissingLevel, "no levels to aggregate");
  // Offsets from the first value keep a constant metric exact.
  double first = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto it = metric_at.find(points[i]);
    if (it == metric_at.end()) throw Error(ErrorCode::MissingLevel, "no metric at sigma " + fmt17(points[i]));
    if (i == 0) first = it->second;
    sum += it->second - first;
  }
  const double mean = first + sum / static_cast<double>(points.size());
  return normalize ? mean : mean * (iv.max - iv.min);
}

double air(const std::map<double, double>& metric_at, const Interval& iv, bool normalize) {
  const auto pts = default_points(iv);
  return air(metric_at, pts, iv, normalize);
}

Metrics acc2_f1(std::span<const PredictionRecord> records, LabelType type) {
  if (records.empty()) throw Error(ErrorCode::EmptyLevel, "no prediction records at this level");
  auto cls = [type](double v) -> long long {
    if (type == LabelType::regression) return v < 0.0 ? 0 : 1;
    return std::llround(v);
  };
  std::map<long long, std::size_t> tp, fp, fn, support;
  std::size_t correct = 0;
  for (const auto& r : records) {
    const auto y = cls(r.label), p = cls(r.prediction);
    ++support[y];
    if (y == p) {
      ++correct;
      ++tp[y];
    } else {
      ++fp[p];
      ++fn[y];
    }
  }
  const double n = static_cast<double>(records.size());
  double f1 = 0.0;
  for (const auto& [c, s] : support) {
    const double t = static_cast<double>(tp[c]);
    const double denom = 2.0 * t + static_cast<double>(fp[c] + fn[c]);
    const double fc = denom > 0.0 ? 2.0 * t / denom : 0.0;
    f1 += static_cast<double>(s) / n * fc;
  }
  return {static_cast<double>(correct) / n, f1};
}

// ---------------------------------------------------------------------------
// Datasets, predictors, plans

Dataset load_dataset(const fs::path& manifest) {
  const auto j = parse_json_text(read_file(manifest, ErrorCode::Io), manifest.string());
  Dataset d;
  d.source = manifest;
  const auto base = manifest.parent_path();
  try {
    for (const auto& e : j.at("instances")) {
      Instance inst;
      inst.id = e.at("id").get<std::string>();
      inst.path = resolve(base, e.at("path").get<std::string>());
      if (e.contains("label") && !e["label"].is_null()) inst.label = e["label"].get<double>();
      inst.split = e.value("split", "");
      inst.modality = e.value("modality", "");
      d.instances.push_back(std::move(inst));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, manifest.string() + ": " + ex.what());
  }
  std::set<std::string> seen;
  for (const auto& i : d.instances) {
    if (!seen.insert(i.id).second) throw Error(ErrorCode::ParseError, "duplicate instance id '" + i.id + "'");
  }
  return d;
}

void save_dataset(const fs::path& manifest, const Dataset& dataset) {
  json arr = json::array();
  for (const auto& i : dataset.instances) {
    json e = {{"id", i.id}, {"path", i.path.string()}};
    e["label"] = i.label ? json(*i.label) : json(nullptr);
    if (!i.split.empty()) e["split"] = i.split;
    if (!i.modality.empty()) e["modality"] = i.modality;
    arr.push_back(std::move(e));
  }
  write_file(manifest, json{{"instances", arr}}.dump(2) + "\n");
}

PredictorSpec predictor_from_json(const json& j, const fs::path& base) {
  PredictorSpec p;
  try {
    p.name = j.value("name", p.name);
    const auto mode = j.value("mode", std::string("command"));
    if (mode == "command") {
      p.mode = PredictorSpec::Mode::command;
      const auto& c = j.at("command");
      if (c.is_string()) {
        p.command = {c.get<std::string>()};
      } else {
        p.command = c.get<std::vector<std::string>>();
        if (!p.command.empty() && p.command[0].find('/') != std::string::npos) {
          p.command[0] = resolve(base, p.command[0]).string();
        }
      }
      if (p.command.empty()) throw Error(ErrorCode::ParseError, "predictor command is empty");
    } else if (mode == "precomputed") {
      p.mode = PredictorSpec::Mode::precomputed;
      p.predictions = resolve(base, j.at("predictions").get<std::string>());
    } else {
      throw Error(ErrorCode::ParseError, "predictor mode must be 'command' or 'precomputed', got '" + mode + "'");
    }
    const auto lt = j.value("label_type", std::string("regression"));
    if (lt == "regression") {
      p.label_type = LabelType::regression;
    } else if (lt == "classification") {
      p.label_type = LabelType::classification;
    } else {
      throw Error(ErrorCode::ParseError, "unknown label_type '" + lt + "'");
    }
    p.stateless = j.value("stateless", false);
    p.denoiser = j.value("denoiser", "");
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("predictor: ") + ex.what());
  }
  return p;
}

json to_json(const PredictorSpec& p) {
  json j = {{"name", p.name},
            {"mode", p.mode == PredictorSpec::Mode::command ? "command" : "precomputed"},
            {"label_type", p.label_type == LabelType::regression ? "regression" : "classification"},
            {"stateless", p.stateless}};
  if (p.mode == PredictorSpec::Mode::command) {
    j["command"] = p.command;
  } else {
    j["predictions"] = p.predictions.string();
  }
  if (!p.denoiser.empty()) j["denoiser"] = p.denoiser;
  return j;
}

std::vector<double> SweepPlan::resolved_points() const {
  if (points) {
    if (points->empty()) throw Error(ErrorCode::BadInterval, "explicit point list is empty");
    return *points;
  }
  return default_points(interval);
}

SweepPlan plan_from_json(const json& j, const fs::path& base) {
  SweepPlan p;
  try {
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = find_kind(kind_name);
    if (!kind) throw Error(ErrorCode::UnknownKind, "unknown noise kind '" + kind_name + "'");
    p.kind = *kind;
    const auto info = indicator_for(p.kind);
    p.indicator = j.value("indicator", info.name);
    p.interval = info.interval;
    if (j.contains("interval")) {
      const auto& iv = j["interval"];
      if (iv.is_array()) {
        if (iv.size() < 2 || iv.size() > 3) throw Error(ErrorCode::ParseError, "interval must be [min, max, step]");
        p.interval.min = iv[0].get<double>();
        p.interval.max = iv[1].get<double>();
        p.interval.step = iv.size() == 3 ? iv[2].get<double>() : (p.interval.max - p.interval.min) / 10.0;
      } else {
        p.interval.min = iv.at("min").get<double>();
        p.interval.max = iv.at("max").get<double>();
        p.interval.step = iv.value("step", (p.interval.max - p.interval.min) / 10.0);
      }
    }
    if (!(p.interval.min < p.interval.max)) {
      throw Error(ErrorCode::BadInterval, "interval needs min < max");
    }
    if (!(p.interval.step > 0.0)) throw Error(ErrorCode::BadInterval, "interval step must be positive");
    if (j.contains("points") && !j["points"].is_null()) p.points = j["points"].get<std::vector<double>>();
    p.dataset = resolve(base, j.at("dataset").get<std::string>());
    p.predictor = predictor_from_json(j.at("predictor"), base);
    p.seed = j.value("seed", std::uint64_t{0});
    p.repeats = j.value("repeats", 1);
    if (p.repeats < 1) throw Error(ErrorCode::ParseError, "repeats must be >= 1");
    if (j.contains("params")) p.params = j["params"];
    if (!p.params.is_object()) throw Error(ErrorCode::ParseError, "params must be an object");
    p.work_dir = resolve(base, j.value("work_dir", std::string("vna-work")));
    if (j.contains("assets")) p.assets = resolve(base, j["assets"].get<std::string>());
    p.workers = j.value("workers", 0u);
    p.lossless = j.value("lossless", true);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("plan: ") + ex.what());
  }
  return p;
}

SweepPlan load_plan(const fs::path& path) {
  return plan_from_json(parse_json_text(read_file(path, ErrorCode::Io), path.string()), path.parent_path());
}

json to_json(const SweepPlan& p) {
  json j = {{"kind", name_of(p.kind)},
            {"indicator", p.indicator},
            {"interval", {p.interval.min, p.interval.max, p.interval.step}},
            {"points", p.resolved_points()},
            {"dataset", p.dataset.string()},
            {"predictor", to_json(p.predictor)},
            {"seed", p.seed},
            {"repeats", p.repeats},
            {"params", p.params},
            {"work_dir", p.work_dir.string()},
            {"lossless", p.lossless}};
  if (p.assets) j["assets"] = p.assets->string();
  return j;
}

std::uint64_t instance_seed(std::uint64_t plan_seed, double sigma, const std::string& id, int repeat) {
  return derive_seed(plan_seed, std::bit_cast<std::uint64_t>(sigma), hash_string(id),
                     static_cast<std::uint64_t>(repeat));
}

// ---------------------------------------------------------------------------
// Materialization

namespace {

NoiseItem make_item(NoiseKind kind, double intensity, const json& params) {
  NoiseItem it;
  it.kind = kind;
  it.modality = modality_of(kind);
  it.intensity = intensity;
  it.params = params.empty() ? json(nullptr) : params;
  return it;
}

ValidatedSpec single_item(NoiseItem item, std::uint64_t seed, const MediaMeta& meta) {
  NoiseSpec spec;
  spec.seed = seed;
  spec.items.push_back(std::move(item));
  return validate(spec, meta);
}

json index_params(const json& params) {
  json p = params.is_object() ? params : json::object();
  p["unit"] = "index";
  return p;
}

struct Materializer {
  NoiseKind kind;
  json params;
  bool lossless;
  audio::AssetLibrary* assets;

  /// Writes the noised copy of `inst` under `dir` and returns its path.
  fs::path operator()(const Instance& inst, double intensity, std::uint64_t seed, const fs::path& dir) const {
    const auto mod = modality_for(inst);
    const auto stem = safe_name(inst.id);
    if (mod == "feature") {
      if (modality_of(kind) != Modality::feature) {
        throw Error(ErrorCode::UnknownKind, "'" + std::string(name_of(kind)) + "' cannot apply to feature instance '" +
                                                inst.id + "'");
      }
      const auto seq = feature::load(inst.path);
      auto item = make_item(kind, intensity, index_params(params));
      item.end_s = static_cast<double>(seq.steps);
      const auto vs = single_item(std::move(item), seed, MediaMeta{});
      const auto out = dir / (stem + ".vfs");
      feature::save(out, feature::apply_item(seq, vs.spec().items[0], vs.item_seed(0)));
      return out;
    }
    if (mod == "text") {
      if (modality_of(kind) != Modality::text) {
        throw Error(ErrorCode::UnknownKind, "'" + std::string(name_of(kind)) + "' cannot apply to text instance '" +
                                                inst.id + "'");
      }
      const auto t = text::load_asr_variant(inst.path);
      auto item = make_item(kind, intensity, index_params(params));
      item.end_s = static_cast<double>(t.words.size());
      const auto vs = single_item(std::move(item), seed, MediaMeta{});
      const auto out = dir / (stem + ".json");
      text::save_transcript(out, text::apply_item(t, vs.spec().items[0], vs.item_seed(0)));
      return out;
    }
    const auto m = modality_of(kind);
    if (m != Modality::audio && m != Modality::video) {
      throw Error(ErrorCode::UnknownKind, "'" + std::string(name_of(kind)) + "' cannot apply to media instance '" +
                                              inst.id + "'");
    }
    const auto meta = media::probe(inst.path);
    auto item = make_item(kind, intensity, params);
    item.start_s = 0.0;
    item.end_s = meta.duration_s;
    const auto vs = single_item(std::move(item), seed, meta);
    const auto out = dir / (stem + (lossless ? std::string(".mkv") : inst.path.extension().string()));
    media::InjectOptions opt;
    opt.lossless = lossless;
    opt.assets = assets;
    media::inject(inst.path, out, vs, opt);
    return out;
  }
};

std::map<std::string, double> read_predictions(const fs::path& csv, const std::string& who) {
  std::ifstream is(csv, std::ios::binary);
  if (!is) predictor_failure(who + ": no output file " + csv.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  const auto lines = csv_lines(ss.str());
  if (lines.empty()) predictor_failure(who + ": " + csv.string() + " is empty");
  const auto& [hn, header] = lines.front();
  if (split(header, ',') != std::vector<std::string>{"id", "prediction"}) {
    predictor_failure(who + ": " + csv.string() + " line " + std::to_string(hn) + ": expected header 'id,prediction'");
  }
  std::map<std::string, double> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [n, line] = lines[i];
    const auto where = who + ": " + csv.string() + " line " + std::to_string(n);
    const auto f = split(line, ',');
    if (f.size() != 2 || f[0].empty()) predictor_failure(where + ": expected 'id,prediction', got '" + line + "'");
    const auto v = parse_double(f[1]);
    if (!v) predictor_failure(where + ": prediction '" + f[1] + "' is not a finite number");
    if (!out.emplace(f[0], *v).second) predictor_failure(where + ": duplicate id '" + f[0] + "'");
  }
  return out;
}

std::string substitute(std::string s, const std::map<std::string, std::string>& vars, bool quote) {
  for (const auto& [k, v] : vars) {
    const auto key = "{" + k + "}";
    const auto val = quote ? proc::shell_quote(v) : v;
    for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + val.size())) {
      s.replace(pos, key.size(), val);
    }
  }
  return s;
}

}  // namespace

std::map<std::string, double> invoke_predictor(const PredictorSpec& pred, const json& manifest, const fs::path& dir,
                                               const std::map<std::string, std::string>& extra_vars,
                                               const std::string& context) {
  if (pred.mode != PredictorSpec::Mode::command) predictor_failure("predictor '" + pred.name + "' has no command");
  const auto mpath = dir / "manifest.json";
  const auto opath = dir / "predictions.csv";
  write_file(mpath, manifest.dump(2) + "\n");
  fs::remove(opath);
  std::map<std::string, std::string> vars = extra_vars;
  vars["manifest"] = mpath.string();
  vars["output"] = opath.string();
  vars["denoiser"] = manifest.value("denoiser", pred.denoiser);
  for (const char* k : {"sigma", "intensity"}) {
    if (manifest.contains(k)) vars[k] = fmt17(manifest[k].get<double>());
  }
  if (manifest.contains("kind")) vars["kind"] = manifest["kind"].get<std::string>();
  proc::Result res;
  if (pred.command.size() == 1) {
    res = proc::run_shell(substitute(pred.command[0], vars, true));
  } else {
    std::vector<std::string> argv;
    for (const auto& a : pred.command) argv.push_back(substitute(a, vars, false));
    res = proc::run(argv);
  }
  const auto who = "predictor '" + pred.name + "'" + (context.empty() ? "" : " " + context);
  if (res.exit_code != 0) {
    const auto tail = res.err.size() > 2000 ? res.err.substr(res.err.size() - 2000) : res.err;
    predictor_failure(who + " exited with status " + std::to_string(res.exit_code) + ": " + tail);
  }
  return read_predictions(opath, who);
}

// ---------------------------------------------------------------------------
// Sweep

std::string RobustnessReport::label() const { return predictor.empty() ? kind : predictor; }

void finalize(RobustnessReport& r) {
  std::map<double, double> acc, f1;
  std::vector<double> pts;
  for (const auto& l : r.levels) {
    acc[l.sigma] = l.metrics.acc2;
    f1[l.sigma] = l.metrics.f1;
    pts.push_back(l.sigma);
  }
  r.air = {air(acc, pts, r.interval, true), air(f1, pts, r.interval, true)};
  r.air_area = {air(acc, pts, r.interval, false), air(f1, pts, r.interval, false)};
}

RobustnessReport run_sweep(const SweepPlan& plan) {
  RobustnessReport report;
  report.started = utc_now();
  report.predictor = plan.predictor.name;
  report.kind = std::string(name_of(plan.kind));
  report.indicator = plan.indicator;
  report.interval = plan.interval;
  report.plan = to_json(plan);

  const auto dataset = load_dataset(plan.dataset);
  std::map<std::string, double> labels;
  for (const auto& inst : dataset.instances) {
    if (!inst.label) throw Error(ErrorCode::MissingLabel, "instance '" + inst.id + "' has no label");
    labels[inst.id] = *inst.label;
  }
  const auto points = plan.resolved_points();
  const auto info = indicator_for(plan.kind);
  const std::size_t nk = points.size();
  const auto reps = static_cast<std::size_t>(plan.repeats);
  const auto& pred = plan.predictor;

  // predictions[k * reps + r][id]
  std::vector<std::map<std::string, double>> predictions(nk * reps);

  if (pred.mode == PredictorSpec::Mode::precomputed) {
    const auto text = read_file(pred.predictions, ErrorCode::PredictorFailure);
    const auto lines = csv_lines(text);
    const auto who = pred.predictions.string();
    if (lines.empty() || split(lines.front().second, ',') != std::vector<std::string>{"sigma", "id", "prediction"}) {
      predictor_failure(who + " line 1: expected header 'sigma,id,prediction'");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto& [n, line] = lines[i];
      const auto where = who + " line " + std::to_string(n);
      const auto f = split(line, ',');
      if (f.size() != 3) predictor_failure(where + ": expected 'sigma,id,prediction', got '" + line + "'");
      const auto s = parse_double(f[0]);
      const auto v = parse_double(f[2]);
      if (!s || !v) predictor_failure(where + ": non-numeric field in '" + line + "'");
      const auto it = std::find_if(points.begin(), points.end(), [&](double p) {
        return std::abs(p - *s) <= 1e-9 * std::max(1.0, std::abs(p));
      });
      if (it == points.end()) continue;  // levels outside the plan are ignored
      const auto k = static_cast<std::size_t>(it - points.begin());
      for (std::size_t r = 0; r < reps; ++r) predictions[k * reps + r][f[1]] = *v;
    }
  } else {
    const auto assets = make_assets(plan.assets);
    const Materializer mat{plan.kind, plan.params, plan.lossless, assets.get()};

    const auto root = plan.work_dir / report.kind;
    auto level_dir = [&](std::size_t k, std::size_t r) {
      return root / ("s" + std::to_string(k) + "_r" + std::to_string(r));
    };
    const std::size_t ni = dataset.instances.size();
    std::vector<fs::path> noised(nk * reps * ni);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t r = 0; r < reps; ++r) fs::create_directories(level_dir(k, r));
    }
    parallel_for(noised.size(), plan.workers, [&](std::size_t t) {
      const std::size_t i = t % ni, kr = t / ni, k = kr / reps, r = kr % reps;
      const auto& inst = dataset.instances[i];
      noised[t] = mat(inst, points[k] * info.to_intensity,
                      instance_seed(plan.seed, points[k], inst.id, static_cast<int>(r)), level_dir(k, r));
    });

    auto predict = [&](std::size_t kr) {
      const std::size_t k = kr / reps, r = kr % reps;
      const auto dir = level_dir(k, r);
      json inst_arr = json::array();
      for (std::size_t i = 0; i < ni; ++i) {
        const auto& inst = dataset.instances[i];
        inst_arr.push_back({{"id", inst.id},
                            {"path", noised[kr * ni + i].string()},
                            {"modality", modality_for(inst)},
                            {"source", inst.path.string()}});
      }
      const json manifest = {{"sigma", points[k]},
                             {"intensity", points[k] * info.to_intensity},
                             {"kind", report.kind},
                             {"repeat", r},
                             {"denoiser", pred.denoiser},
                             {"instances", inst_arr}};
      predictions[kr] = invoke_predictor(pred, manifest, dir, {{"dataset", plan.dataset.string()}},
                                         "at sigma " + fmt17(points[k]));
    };
    parallel_for(nk * reps, pred.stateless ? plan.workers : 1u, predict);
  }

  for (std::size_t k = 0; k < nk; ++k) {
    Level level;
    level.sigma = points[k];
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& got = predictions[k * reps + r];
      std::vector<PredictionRecord> recs;
      for (const auto& inst : dataset.instances) {
        const auto it = got.find(inst.id);
        if (it == got.end()) {
          predictor_failure("predictor '" + pred.name + "' gave no prediction for '" + inst.id + "' at sigma " +
                            fmt17(points[k]));
        }
        recs.push_back({inst.id, labels[inst.id], it->second, points[k]});
      }
      for (const auto& [id, v] : got) {
        if (!labels.count(id)) {
          predictor_failure("predictor '" + pred.name + "' predicted unknown id '" + id + "' at sigma " +
                            fmt17(points[k]));
        }
      }
      const auto m = acc2_f1(recs, pred.label_type);
      level.metrics.acc2 += m.acc2;
      level.metrics.f1 += m.f1;
      level.records.insert(level.records.end(), recs.begin(), recs.end());
    }
    level.metrics.acc2 /= static_cast<double>(reps);
    level.metrics.f1 /= static_cast<double>(reps);
    level.count = level.records.size();
    report.levels.push_back(std::move(level));
  }
  finalize(report);
  report.finished = utc_now();
  return report;
}

// ---------------------------------------------------------------------------
// Serialization and export

json to_json(const RobustnessReport& r, bool with_records) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    json e = {{"sigma", l.sigma}, {"acc2", l.metrics.acc2}, {"f1", l.metrics.f1}, {"count", l.count}};
    if (with_records) {
      json recs = json::array();
      for (const auto& p : l.records) recs.push_back({{"id", p.id}, {"label", p.label}, {"prediction", p.prediction}});
      e["records"] = std::move(recs);
    }
    levels.push_back(std::move(e));
  }
  return {{"format", "vna-robustness/1"},
          {"predictor", r.predictor},
          {"kind", r.kind},
          {"indicator", r.indicator},
          {"interval", {{"min", r.interval.min}, {"max", r.interval.max}, {"step", r.interval.step}}},
          {"levels", levels},
          {"air", {{"acc2", r.air.acc2}, {"f1", r.air.f1}, {"normalized", true}}},
          {"air_area", {{"acc2", r.air_area.acc2}, {"f1", r.air_area.f1}}},
          {"plan", r.plan},
          {"started", r.started},
          {"finished", r.finished}};
}

RobustnessReport report_from_json(const json& j) {
  RobustnessReport r;
  try {
    r.predictor = j.value("predictor", "");
    r.kind = j.value("kind", "");
    r.indicator = j.value("indicator", "");
    const auto& iv = j.at("interval");
    r.interval = {iv.at("min").get<double>(), iv.at("max").get<double>(), iv.value("step", 0.0)};
    for (const auto& e : j.at("levels")) {
      Level l;
      l.sigma = e.at("sigma").get<double>();
      l.metrics = {e.at("acc2").get<double>(), e.at("f1").get<double>()};
      l.count = e.value("count", std::size_t{0});
      if (e.contains("records")) {
        for (const auto& p : e["records"]) {
          l.records.push_back(
              {p.at("id").get<std::string>(), p.at("label").get<double>(), p.at("prediction").get<double>(), l.sigma});
        }
      }
      r.levels.push_back(std::move(l));
    }
    r.plan = j.value("plan", json());
    r.started = j.value("started", "");
    r.finished = j.value("finished", "");
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + ex.what());
  }
  finalize(r);
  return r;
}

RobustnessReport load_report(const fs::path& path) {
  return report_from_json(parse_json_text(read_file(path, ErrorCode::Io), path.string()));
}

std::string export_csv(const RobustnessReport& r) {
  std::string s = "# format=vna-curve/1\n";
  s += "# predictor=" + r.predictor + "\n";
  s += "# kind=" + r.kind + "\n";
  s += "# indicator=" + r.indicator + "\n";
  s += "# interval=" + fmt17(r.interval.min) + ";" + fmt17(r.interval.max) + ";" + fmt17(r.interval.step) + "\n";
  s += "# air_acc2=" + fmt17(r.air.acc2) + "\n";
  s += "# air_f1=" + fmt17(r.air.f1) + "\n";
  s += "# air_area_acc2=" + fmt17(r.air_area.acc2) + "\n";
  s += "# air_area_f1=" + fmt17(r.air_area.f1) + "\n";
  s += "sigma,acc2,f1,count\n";
  for (const auto& l : r.levels) {
    s += fmt17(l.sigma) + "," + fmt17(l.metrics.acc2) + "," + fmt17(l.metrics.f1) + "," + std::to_string(l.count) + "\n";
  }
  return s;
}

std::string export_json(const RobustnessReport& r) { return to_json(r, false).dump(2) + "\n"; }

RobustnessReport import_csv(std::string_view text) {
  RobustnessReport r;
  bool header = false;
  for (const auto& [n, line] : csv_lines(text)) {
    const auto where = "curve csv line " + std::to_string(n);
    if (line[0] == '#') {
      const auto body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const auto key = body.substr(0, eq), val = body.substr(eq + 1);
      if (key == "predictor") r.predictor = val;
      if (key == "kind") r.kind = val;
      if (key == "indicator") r.indicator = val;
      if (key == "interval") {
        const auto f = split(val, ';');
        const auto a = f.size() == 3 ? parse_double(f[0]) : std::nullopt;
        const auto b = f.size() == 3 ? parse_double(f[1]) : std::nullopt;
        const auto c = f.size() == 3 ? parse_double(f[2]) : std::nullopt;
        if (!a || !b || !c) throw Error(ErrorCode::ParseError, where + ": bad interval '" + val + "'");
        r.interval = {*a, *b, *c};
      }
      continue;
    }
    if (!header) {
      if (split(line, ',') != std::vector<std::string>{"sigma", "acc2", "f1", "count"}) {
        throw Error(ErrorCode::ParseError, where + ": expected header 'sigma,acc2,f1,count'");
      }
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    std::optional<double> s, a, b, c;
    if (f.size() == 4) s = parse_double(f[0]), a = parse_double(f[1]), b = parse_double(f[2]), c = parse_double(f[3]);
    if (!s || !a || !b || !c) throw Error(ErrorCode::ParseError, where + ": malformed row '" + line + "'");
    Level l;
    l.sigma = *s;
    l.metrics = {*a, *b};
    l.count = static_cast<std::size_t>(*c);
    r.levels.push_back(std::move(l));
  }
  if (!header) throw Error(ErrorCode::ParseError, "curve csv has no header row");
  if (!r.levels.empty()) finalize(r);
  return r;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string export_svg(std::span<const RobustnessReport> reports, CurveMetric metric) {
  constexpr double W = 640, H = 400, L = 60, R = 180, T = 30, B = 50;
  constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  double x0 = 0, x1 = 1;
  if (!reports.empty()) {
    x0 = reports[0].interval.min;
    x1 = reports[0].interval.max;
    for (const auto& r : reports) {
      x0 = std::min(x0, r.interval.min);
      x1 = std::max(x1, r.interval.max);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - std::clamp(y, 0.0, 1.0) * (H - T - B); };

  std::vector<std::string> names;
  for (const auto& r : reports) names.push_back(r.label());
  // Same predictor under several noises: name series by kind too.
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (std::count(names.begin(), names.end(), names[i]) > 1) {
      for (std::size_t j = 0; j < reports.size(); ++j) {
        if (reports[j].label() == reports[i].label()) names[j] = reports[j].label() + " / " + reports[j].kind;
      }
    }
  }

  const char* mname = metric == CurveMetric::acc2 ? "Acc-2" : "F1";
  std::string xlabel = reports.empty() ? "sigma" : reports[0].indicator;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<g class=\"axes\" stroke=\"black\">\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  o << "</g>\n<g class=\"ticks\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = i / 5.0;
    o << "<line x1=\"" << L - 4 << "\" y1=\"" << py(y) << "\" x2=\"" << L << "\" y2=\"" << py(y)
      << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
      << fmt("%.1f", y) << "</text>\n";
    const double x = x0 + (x1 - x0) * i / 5.0;
    o << "<line x1=\"" << px(x) << "\" y1=\"" << H - B << "\" x2=\"" << px(x) << "\" y2=\"" << H - B + 4
      << "\" stroke=\"black\"/><text x=\"" << px(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << fmt("%.3g", x) << "</text>\n";
  }
  o << "</g>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
    << "</text>\n";
  o << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << (T + H - B) / 2 << ")\">" << mname << "</text>\n";

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const char* c = colors[i % std::size(colors)];
    o << "<polyline class=\"series\" data-name=\"" << xml_escape(names[i]) << "\" fill=\"none\" stroke=\"" << c
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < reports[i].levels.size(); ++k) {
      const auto& l = reports[i].levels[k];
      const double v = metric == CurveMetric::acc2 ? l.metrics.acc2 : l.metrics.f1;
      o << (k ? " " : "") << fmt("%.2f", px(l.sigma)) << "," << fmt("%.2f", py(v));
    }
    o << "\"/>\n";
  }
  o << "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double y = T + 10 + 20.0 * static_cast<double>(i);
    o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << y << "\" x2=\"" << W - R + 40 << "\" y2=\"" << y
      << "\" stroke=\"" << colors[i % std::size(colors)] << "\" stroke-width=\"2\"/>";
    o << "<text x=\"" << W - R + 46 << "\" y=\"" << y + 4 << "\">" << xml_escape(names[i]) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void export_curves(const RobustnessReport& report, CurveFormat format, const fs::path& out) {
  switch (format) {
    case CurveFormat::csv: write_file(out, export_csv(report)); break;
    case CurveFormat::json: write_file(out, export_json(report)); break;
    case CurveFormat::svg: write_file(out, export_svg(std::span(&report, 1))); break;
  }
}

// ---------------------------------------------------------------------------
// Augmentation

Dataset augment(const Dataset& dataset, const ConfigFile& config, const AugmentOptions& options) {
  if (options.copies < 0) throw Error(ErrorCode::ParseError, "copies must be >= 0");
  if (!config.spec && !config.random) throw Error(ErrorCode::ParseError, "config holds neither a spec nor a recipe");
  const auto assets = make_assets(options.assets);
  fs::create_directories(options.out_dir);
  const std::uint64_t base = config.spec ? config.spec->seed : config.random->seed;

  Dataset out;
  out.instances = dataset.instances;
  for (const auto& inst : dataset.instances) {
    if (options.split && inst.split != *options.split) continue;
    const auto mod = modality_for(inst);
    for (int c = 0; c < options.copies; ++c) {
      const std::uint64_t seed = derive_seed(base, hash_string(inst.id), static_cast<std::uint64_t>(c));
      Instance copy = inst;
      copy.id = inst.id + "#" + std::to_string(c);
      const auto stem = safe_name(inst.id) + ".aug" + std::to_string(c);
      if (mod == "feature" || mod == "text") {
        if (!config.spec) {
          throw Error(ErrorCode::UnknownMode, "random recipes cover media only; '" + inst.id + "' is " + mod);
        }
        NoiseSpec spec = *config.spec;
        spec.seed = seed;
        const auto vs = validate(spec, MediaMeta{});
        if (mod == "feature") {
          auto seq = feature::load(inst.path);
          for (std::size_t i = 0; i < vs.spec().items.size(); ++i) {
            if (vs.spec().items[i].modality == Modality::feature) {
              seq = feature::apply_item(seq, vs.spec().items[i], vs.item_seed(i));
            }
          }
          copy.path = options.out_dir / (stem + ".vfs");
          feature::save(copy.path, seq);
        } else {
          auto t = text::load_asr_variant(inst.path);
          for (std::size_t i = 0; i < vs.spec().items.size(); ++i) {
            if (vs.spec().items[i].modality == Modality::text) {
              t = text::apply_item(t, vs.spec().items[i], vs.item_seed(i));
            }
          }
          copy.path = options.out_dir / (stem + ".json");
          text::save_transcript(copy.path, t);
        }
      } else {
        const auto meta = media::probe(inst.path);
        NoiseSpec spec;
        if (config.spec) {
          spec = *config.spec;
          spec.seed = seed;
        } else {
          auto params = *config.random;
          params.seed = seed;
          spec = generate_random(params, meta);
        }
        copy.path = options.out_dir / (stem + (options.lossless ? std::string(".mkv") : inst.path.extension().string()));
        media::InjectOptions opt;
        opt.lossless = options.lossless;
        opt.assets = assets.get();
        media::inject(inst.path, copy.path, validate(spec, meta), opt);
      }
      out.instances.push_back(std::move(copy));
    }
  }
  return out;
}

}  // namespace vna::eval
