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

#include "vna/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "vna/audio.hpp"
#include "vna/audio_io.hpp"
#include "vna/error.hpp"
#include "vna/media_io.hpp"
#include "vna/subprocess.hpp"

namespace vna::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Write-then-rename so readers never see a torn file.
void write_atomic(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << text;
    if (!os) throw Error(ErrorCode::Io, "cannot write " + tmp);
  }
  fs::rename(tmp, p);
}

std::string new_id() {
  static std::mutex m;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

std::string extension_of(const std::string& filename) {
  auto ext = fs::path(filename).extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext.size() < 2 || ext.size() > 6 ||
      !std::all_of(ext.begin() + 1, ext.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
    return ".bin";
  }
  return ext;
}

std::string safe_token(const std::string& s) {
  std::string o;
  for (char c : s) o += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return o;
}

bool has_text_items(const NoiseSpec& spec) {
  return std::any_of(spec.items.begin(), spec.items.end(),
                     [](const NoiseItem& i) { return i.modality == Modality::text; });
}

void make_preview(const fs::path& in, const fs::path& out, const MediaMeta& meta) {
  std::vector<std::string> args = {media::transcoder(), "-hide_banner", "-nostdin", "-v", "error", "-y",
                                   "-i", in.string()};
  if (meta.has_video) {
    args.insert(args.end(), {"-map", "0:V:0", "-c:v", "libx264", "-preset", "veryfast", "-crf", "23", "-pix_fmt",
                             "yuv420p", "-vf", "scale=trunc(iw/2)*2:trunc(ih/2)*2"});
  }
  if (meta.has_audio) args.insert(args.end(), {"-map", "0:a:0", "-c:a", "aac", "-b:a", "128k"});
  args.insert(args.end(), {"-movflags", "+faststart", out.string()});
  const auto r = proc::run(args);
  if (r.exit_code != 0) {
    throw Error(ErrorCode::GenerationFailed, "preview transcode failed: " + r.err.substr(r.err.size() > 2000 ? r.err.size() - 2000 : 0));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Proxy features

ProxyFeatures extract_proxy_features(const fs::path& media_path, const std::optional<text::Transcript>& transcript) {
  const auto meta = media::probe(media_path);
  ProxyFeatures f;
  f.fps = meta.has_video ? meta.fps : 0.0;
  f.window_s = meta.has_video && meta.fps > 0 ? 1.0 / meta.fps : kDefaultWindowS;

  if (meta.has_audio) {
    const auto pcm = media::decode_audio(media_path);
    const std::size_t n = pcm.samples();
    std::vector<double> mono(n, 0.0);
    for (const auto& ch : pcm.channels) {
      for (std::size_t i = 0; i < n; ++i) mono[i] += ch[i];
    }
    for (auto& v : mono) v /= static_cast<double>(pcm.channel_count());
    const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(f.window_s * pcm.sample_rate)));
    for (std::size_t start = 0; start < n; start += win) {
      const std::size_t len = std::min(win, n - start);
      double e = 0.0;
      std::vector<double> frame(len);
      for (std::size_t i = 0; i < len; ++i) {
        const double x = mono[start + i];
        e += x * x;
        const double hann = len > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                           static_cast<double>(len - 1))
                                    : 1.0;
        frame[i] = x * hann;
      }
      f.audio_rms.push_back(std::sqrt(e / static_cast<double>(len)));
      const auto p = audio::power_spectrum(frame);
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double hz = static_cast<double>(k) * pcm.sample_rate / static_cast<double>(len);
        num += hz * p[k];
        den += p[k];
      }
      f.audio_centroid_hz.push_back(den > 0.0 ? num / den : 0.0);
    }
  }

  if (meta.has_video) {
    std::vector<double> luma;
    media::for_each_frame(media_path, [&](const Frame& fr, std::size_t) {
      const int w = fr.width, h = fr.height;
      luma.assign(static_cast<std::size_t>(w) * h, 0.0);
      double sum = 0.0;
      for (std::size_t i = 0; i < luma.size(); ++i) {
        const auto* p = fr.pixels.data() + 3 * i;
        luma[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        sum += luma[i];
      }
      f.video_luma.push_back(sum / static_cast<double>(luma.size()));
      double edge = 0.0;
      std::size_t count = 0;
      for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
          auto L = [&](int dx, int dy) { return luma[static_cast<std::size_t>(y + dy) * w + (x + dx)]; };
          const double gx = (L(1, -1) + 2 * L(1, 0) + L(1, 1)) - (L(-1, -1) + 2 * L(-1, 0) + L(-1, 1));
          const double gy = (L(-1, 1) + 2 * L(0, 1) + L(1, 1)) - (L(-1, -1) + 2 * L(0, -1) + L(1, -1));
          edge += gx * gx + gy * gy;
          ++count;
        }
      }
      f.video_edge.push_back(count ? edge / static_cast<double>(count) : 0.0);
    });
  }

  if (transcript) {
    for (const auto& w : transcript->words) f.tokens.push_back(w.token);
  }
  return f;
}

json to_json(const ProxyFeatures& f) {
  return {{"audio", {{"window_s", f.window_s}, {"rms", f.audio_rms}, {"centroid_hz", f.audio_centroid_hz}}},
          {"video", {{"fps", f.fps}, {"luma", f.video_luma}, {"edge", f.video_edge}}},
          {"text", {{"tokens", f.tokens}}}};
}

// ---------------------------------------------------------------------------
// Registry and error mapping

std::map<std::string, eval::PredictorSpec> load_predictor_registry(const fs::path& path) {
  const auto j = parse_json_text(read_text(path), path.string());
  std::map<std::string, eval::PredictorSpec> out;
  if (!j.contains("predictors") || !j["predictors"].is_array()) {
    throw Error(ErrorCode::ParseError, path.string() + ": expected {\"predictors\": [...]}");
  }
  for (const auto& e : j["predictors"]) {
    auto p = eval::predictor_from_json(e, path.parent_path());
    if (p.mode != eval::PredictorSpec::Mode::command) {
      throw Error(ErrorCode::ParseError, "registry predictor '" + p.name + "' must be a command");
    }
    out[p.name] = std::move(p);
  }
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::NotGenerated: return 409;
    case ErrorCode::PredictorFailure: return 502;
    case ErrorCode::TranscoderMissing: return 503;
    case ErrorCode::GenerationFailed:
    case ErrorCode::EncodeError:
    case ErrorCode::PipeProtocolError:
    case ErrorCode::Io: return 500;
    default: return 422;
  }
}

// ---------------------------------------------------------------------------
// Sessions

struct Service::Session {
  std::string id;
  std::string created;
  std::string filename;
  std::string original;  // file name inside the session directory
  MediaMeta meta;
  std::optional<text::Transcript> transcript;
  NoiseSpec spec;
  std::uint64_t spec_version = 0;

  // Generation bookkeeping. A job snapshot is taken at submission.
  std::uint64_t next_seq = 1;
  std::optional<std::uint64_t> queued;
  std::optional<std::uint64_t> running;
  NoiseSpec queued_spec;
  std::optional<text::Transcript> queued_transcript;
  std::uint64_t queued_spec_version = 0;
  std::string last_state = "none";  // none | done | failed
  std::optional<std::uint64_t> done_seq;
  std::uint64_t done_spec_version = 0;
  std::string error;
  json report;

  json to_disk() const {
    json j = {{"id", id},
              {"created", created},
              {"filename", filename},
              {"original", original},
              {"meta", vna::to_json(meta)},
              {"transcript", transcript ? text::to_json(*transcript) : json(nullptr)},
              {"spec", json::parse(vna::to_json(spec))},
              {"spec_version", spec_version},
              {"next_seq", next_seq},
              {"last_state", last_state},
              {"done_seq", done_seq ? json(*done_seq) : json(nullptr)},
              {"done_spec_version", done_spec_version},
              {"error", error},
              {"report", report}};
    return j;
  }

  static Session from_disk(const json& j) {
    Session s;
    s.id = j.at("id");
    s.created = j.value("created", "");
    s.filename = j.value("filename", "");
    s.original = j.at("original");
    s.meta = media_meta_from_json(j.at("meta"));
    if (!j["transcript"].is_null()) s.transcript = text::transcript_from_json(j["transcript"]);
    s.spec = spec_from_json(j.at("spec"));
    s.spec_version = j.value("spec_version", std::uint64_t{0});
    s.next_seq = j.value("next_seq", std::uint64_t{1});
    s.last_state = j.value("last_state", "none");
    if (j.contains("done_seq") && !j["done_seq"].is_null()) s.done_seq = j["done_seq"].get<std::uint64_t>();
    s.done_spec_version = j.value("done_spec_version", std::uint64_t{0});
    s.error = j.value("error", "");
    s.report = j.value("report", json());
    return s;
  }
};

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  fs::create_directories(options_.data_dir / "sessions");
  const auto index = options_.data_dir / "index.json";
  if (fs::exists(index)) {
    const auto j = parse_json_text(read_text(index), index.string());
    for (const auto& id : j.value("sessions", json::array())) {
      const auto file = session_dir(id) / "session.json";
      if (!fs::exists(file)) continue;
      auto s = std::make_unique<Session>(Session::from_disk(parse_json_text(read_text(file), file.string())));
      sessions_[s->id] = std::move(s);
    }
  }
  const unsigned n = std::max(1u, options_.workers);
  for (unsigned i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  for (auto& t : workers_) t.join();
}

fs::path Service::session_dir(const std::string& id) const { return options_.data_dir / "sessions" / id; }

Service::Session& Service::find(const std::string& id) const {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return *it->second;
}

void Service::drop_comparisons(const std::string& id) const {
  std::error_code ec;
  const auto gen = session_dir(id) / "gen";
  if (!fs::exists(gen)) return;
  for (const auto& e : fs::recursive_directory_iterator(gen, ec)) {
    const auto name = e.path().filename().string();
    if (name.rfind("compare-", 0) == 0) fs::remove(e.path(), ec);
  }
}

void Service::persist(const Session& s) const { write_atomic(session_dir(s.id) / "session.json", s.to_disk().dump(2)); }

void Service::persist_index() const {
  json ids = json::array();
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  write_atomic(options_.data_dir / "index.json", json{{"sessions", ids}}.dump(2));
}

json Service::view(const Session& s) const {
  json j = s.to_disk();
  j["original_url"] = "/sessions/" + s.id + "/original";
  j["status"] = status(s.id);
  return j;
}

json Service::create_session(const std::string& filename, const std::string& bytes,
                             const std::optional<std::string>& alignment) {
  std::optional<text::Transcript> transcript;
  if (alignment) transcript = text::transcript_from_json(*alignment);
  auto s = std::make_unique<Session>();
  s->id = new_id();
  s->created = utc_now();
  s->filename = filename;
  s->original = "original" + extension_of(filename);
  const auto dir = session_dir(s->id);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / s->original, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorCode::Io, "cannot store upload");
  }
  try {
    s->meta = media::probe(dir / s->original);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
  s->transcript = std::move(transcript);
  std::lock_guard lock(mutex_);
  persist(*s);
  const auto id = s->id;
  sessions_[id] = std::move(s);
  persist_index();
  return view(*sessions_[id]);
}

json Service::get_session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return view(find(id));
}

json Service::list_sessions() const {
  std::lock_guard lock(mutex_);
  json arr = json::array();
  for (const auto& [id, s] : sessions_) {
    arr.push_back({{"id", id}, {"filename", s->filename}, {"created", s->created}});
  }
  return {{"sessions", arr}};
}

json Service::put_transcript(const std::string& id, const std::string& body) {
  auto t = text::transcript_from_json(body);
  std::lock_guard lock(mutex_);
  auto& s = find(id);
  s.transcript = std::move(t);
  drop_comparisons(id);
  persist(s);
  return text::to_json(*s.transcript);
}

json Service::put_noise(const std::string& id, const std::string& body) {
  const auto j = parse_json_text(body, "noise spec");
  std::lock_guard lock(mutex_);
  auto& s = find(id);
  NoiseSpec spec;
  if (j.is_object() && j.contains("mode")) {
    spec = generate_random(random_params_from_json(j), s.meta);
  } else {
    spec = spec_from_json(j);
  }
  const auto vs = validate(spec, s.meta);
  if (has_text_items(vs.spec()) && !s.transcript) {
    throw Error(ErrorCode::ParseError, "text items need a transcript; PUT /sessions/" + id + "/transcript first");
  }
  s.spec = vs.spec();
  ++s.spec_version;
  drop_comparisons(id);
  persist(s);
  return view(s);
}

json Service::generate(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto& s = find(id);
  const std::uint64_t seq = s.next_seq++;
  s.queued_spec = s.spec;
  s.queued_transcript = s.transcript;
  s.queued_spec_version = s.spec_version;
  if (s.queued) {
    // Supersede the waiting job in place.
    for (auto& job : queue_) {
      if (job.session == id) job.seq = seq;
    }
  } else {
    queue_.push_back({id, seq});
  }
  s.queued = seq;
  persist(s);
  lock.unlock();
  changed_.notify_all();
  return {{"job", seq}, {"state", "queued"}, {"status_url", "/sessions/" + id + "/status"}};
}

json Service::status(const std::string& id) const {
  // Callers hold mutex_ or call through get_session.
  const auto& s = find(id);
  std::string state = s.last_state;
  if (s.queued) state = "queued";
  if (s.running) state = "running";
  json j = {{"state", state},
            {"job", s.next_seq - 1},
            {"queued", s.queued ? json(*s.queued) : json(nullptr)},
            {"running", s.running ? json(*s.running) : json(nullptr)},
            {"done_job", s.done_seq ? json(*s.done_seq) : json(nullptr)},
            {"spec_version", s.spec_version},
            {"done_spec_version", s.done_spec_version},
            {"error", s.error}};
  if (s.done_seq) {
    j["preview_url"] = "/sessions/" + id + "/preview";
    j["report"] = s.report;
  }
  return j;
}

void Service::wait_idle(const std::string& id) const {
  std::unique_lock lock(mutex_);
  changed_.wait(lock, [&] {
    const auto& s = find(id);
    return !s.queued && !s.running;
  });
}

void Service::worker_loop() {
  std::unique_lock lock(mutex_);
  for (;;) {
    auto it = queue_.end();
    changed_.wait(lock, [&] {
      if (stopping_) return true;
      it = std::find_if(queue_.begin(), queue_.end(), [&](const Job& j) { return !find(j.session).running; });
      return it != queue_.end();
    });
    if (stopping_) return;
    const Job job = *it;
    queue_.erase(it);
    auto& s = find(job.session);
    s.running = job.seq;
    s.queued.reset();
    lock.unlock();
    run_job(job);
    lock.lock();
    changed_.notify_all();
  }
}

void Service::run_job(const Job& job) {
  std::unique_lock lock(mutex_);
  auto& s = find(job.session);
  const NoiseSpec spec = s.queued_spec;
  const auto transcript = s.queued_transcript;
  const auto spec_version = s.queued_spec_version;
  const auto meta = s.meta;
  const auto input = session_dir(s.id) / s.original;
  const auto out_dir = session_dir(s.id) / "gen" / std::to_string(job.seq);
  persist(s);
  lock.unlock();

  std::string error;
  json report;
  try {
    fs::create_directories(out_dir);
    media::InjectOptions opt;
    opt.lossless = true;
    opt.transcript = has_text_items(spec) ? transcript : std::nullopt;
    std::unique_ptr<audio::AssetLibrary> assets =
        options_.assets ? std::make_unique<audio::AssetLibrary>(*options_.assets) : std::make_unique<audio::AssetLibrary>();
    media::install_decoder(*assets);
    opt.assets = assets.get();
    const auto r = media::inject(input, out_dir / "noisy.mkv", validate(spec, meta), opt);
    report = media::to_json(r);
    make_preview(out_dir / "noisy.mkv", out_dir / (meta.has_video ? "preview.mp4" : "preview.m4a"), meta);
  } catch (const std::exception& e) {
    error = e.what();
  }

  lock.lock();
  s.running.reset();
  if (error.empty()) {
    s.last_state = "done";
    s.done_seq = job.seq;
    s.done_spec_version = spec_version;
    s.error.clear();
    s.report = report;
  } else {
    s.last_state = "failed";
    s.error = std::string(to_string(ErrorCode::GenerationFailed)) + ": " + error;
  }
  persist(s);
}

fs::path Service::preview_path(const std::string& id, bool lossless) const {
  std::lock_guard lock(mutex_);
  const auto& s = find(id);
  if (!s.done_seq) throw Error(ErrorCode::NotGenerated, "session '" + id + "' has no generated media");
  const auto dir = session_dir(id) / "gen" / std::to_string(*s.done_seq);
  if (lossless) return dir / "noisy.mkv";
  return dir / (s.meta.has_video ? "preview.mp4" : "preview.m4a");
}

fs::path Service::original_path(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto& s = find(id);
  return session_dir(id) / s.original;
}

json Service::compare(const std::string& id, const std::string& predictor, const std::string& denoiser) {
  std::unique_lock lock(mutex_);
  const auto& s = find(id);
  if (!s.done_seq) throw Error(ErrorCode::NotGenerated, "session '" + id + "' has no generated media");
  const eval::PredictorSpec* pred = nullptr;
  if (!predictor.empty()) {
    const auto it = options_.predictors.find(predictor);
    if (it == options_.predictors.end()) throw Error(ErrorCode::NotFound, "predictor '" + predictor + "' is not registered");
    pred = &it->second;
  }
  const auto dir = session_dir(id);
  const auto gen = dir / "gen" / std::to_string(*s.done_seq);
  const auto original = dir / s.original;
  const auto transcript = s.transcript;
  const auto done_seq = *s.done_seq;
  lock.unlock();

  const auto cache = gen / ("compare-" + safe_token(predictor) + (denoiser.empty() ? "" : "-" + safe_token(denoiser)) + ".json");
  if (fs::exists(cache)) return parse_json_text(read_text(cache), cache.string());

  const auto orig_cache = dir / "original-features.json";
  json orig;
  if (fs::exists(orig_cache)) {
    orig = parse_json_text(read_text(orig_cache), orig_cache.string());
  } else {
    orig = to_json(extract_proxy_features(original));
    write_atomic(orig_cache, orig.dump());
  }
  json tokens = json::array();
  if (transcript) {
    for (const auto& w : transcript->words) tokens.push_back(w.token);
  }
  orig["text"]["tokens"] = tokens;

  std::optional<text::Transcript> noisy_t = transcript;
  const auto art = media::transcript_artifact(gen / "noisy.mkv");
  if (fs::exists(art)) noisy_t = text::load_asr_variant(art);
  const auto noisy = to_json(extract_proxy_features(gen / "noisy.mkv", noisy_t));

  json payload = {{"session", id},
                  {"job", done_seq},
                  {"time_axis", {{"audio_window_s", orig["audio"]["window_s"]}, {"video_fps", orig["video"]["fps"]}}},
                  {"original", orig},
                  {"noisy", noisy},
                  {"predictions", nullptr}};
  if (pred) {
    const json manifest = {{"sigma", 0.0},
                           {"kind", "session"},
                           {"denoiser", denoiser.empty() ? pred->denoiser : denoiser},
                           {"instances",
                            {{{"id", "original"}, {"path", original.string()}, {"modality", "media"}},
                             {{"id", "noisy"}, {"path", (gen / "noisy.mkv").string()}, {"modality", "media"}}}}};
    const auto work = gen / ("predict-" + safe_token(predictor));
    fs::create_directories(work);
    const auto got = eval::invoke_predictor(*pred, manifest, work, {}, "for session " + id);
    for (const char* k : {"original", "noisy"}) {
      if (!got.count(k)) throw Error(ErrorCode::PredictorFailure, "predictor '" + predictor + "' gave no '" + k + "' row");
    }
    payload["predictions"] = {{"predictor", predictor},
                              {"denoiser", manifest["denoiser"]},
                              {"original", got.at("original")},
                              {"noisy", got.at("noisy")}};
  }
  write_atomic(cache, payload.dump());
  return payload;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send_error(httplib::Response& res, const Error& e) {
  const std::string msg = e.what();
  json body = {{"error", to_string(e.code())}, {"message", msg}};
  std::smatch m;
  static const std::regex field(R"((items\[\d+\](?:\.[a-z_]+)?|[avt]_noise_[a-z]+|words\[\d+\]))");
  if (std::regex_search(msg, m, field)) body["field"] = m.str(1);
  res.status = http_status(e.code());
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_error(res, Error(ErrorCode::Io, e.what()));
    }
  };
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

void send_file(httplib::Response& res, const fs::path& p) {
  static const std::map<std::string, std::string> types = {
      {".mp4", "video/mp4"}, {".m4a", "audio/mp4"},       {".mkv", "video/x-matroska"}, {".webm", "video/webm"},
      {".wav", "audio/wav"}, {".mov", "video/quicktime"}, {".json", "application/json"}};
  const auto it = types.find(p.extension().string());
  const auto type = it == types.end() ? std::string("application/octet-stream") : it->second;
  if (!fs::exists(p)) throw Error(ErrorCode::NotFound, p.filename().string() + " is missing");
  const auto size = fs::file_size(p);
  auto stream = std::make_shared<std::ifstream>(p, std::ios::binary);
  res.set_content_provider(size, type, [stream](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
    std::vector<char> buf(std::min<std::size_t>(length, 1 << 16));
    stream->seekg(static_cast<std::streamoff>(offset));
    stream->read(buf.data(), static_cast<std::streamsize>(buf.size()));
    sink.write(buf.data(), static_cast<std::size_t>(stream->gcount()));
    return true;
  });
}

}  // namespace

void Service::mount(httplib::Server& srv) {
  srv.set_payload_max_length(std::size_t{2} << 30);
  const std::string sid = "/sessions/([0-9a-f]+)";

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"ok", true}}); });
  srv.Get("/kinds", guarded([](const httplib::Request&, httplib::Response& res) {
            json arr = json::array();
            for (const auto& k : kind_registry()) arr.push_back({{"kind", k.name}, {"modality", name_of(k.modality)}});
            send_json(res, {{"kinds", arr}});
          }));
  srv.Get("/predictors", guarded([this](const httplib::Request&, httplib::Response& res) {
            json arr = json::array();
            for (const auto& [name, p] : options_.predictors) arr.push_back(eval::to_json(p));
            send_json(res, {{"predictors", arr}});
          }));
  srv.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) { send_json(res, list_sessions()); }));
  srv.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             std::optional<std::string> alignment;
             if (req.is_multipart_form_data()) {
               if (!req.has_file("media")) throw Error(ErrorCode::ParseError, "multipart field 'media' is required");
               const auto media = req.get_file_value("media");
               if (req.has_file("alignment")) alignment = req.get_file_value("alignment").content;
               send_json(res, create_session(media.filename, media.content, alignment), 201);
             } else {
               const auto name = req.has_param("filename") ? req.get_param_value("filename") : std::string("upload.bin");
               send_json(res, create_session(name, req.body), 201);
             }
           }));
  srv.Get(sid, guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, get_session(req.matches[1]));
          }));
  srv.Put(sid + "/transcript", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, put_transcript(req.matches[1], req.body));
          }));
  auto noise = guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, put_noise(req.matches[1], req.body));
  });
  srv.Post(sid + "/noise", noise);
  srv.Put(sid + "/noise", noise);
  srv.Post(sid + "/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
             send_json(res, generate(req.matches[1]), 202);
           }));
  srv.Get(sid + "/status", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex_);
            send_json(res, status(req.matches[1]));
          }));
  srv.Get(sid + "/preview", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_file(res, preview_path(req.matches[1], req.get_param_value("variant") == "lossless"));
          }));
  srv.Get(sid + "/original", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_file(res, original_path(req.matches[1]));
          }));
  srv.Get(sid + "/compare", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, compare(req.matches[1], req.get_param_value("predictor"), req.get_param_value("denoiser")));
          }));
  if (options_.static_dir) srv.set_mount_point("/", options_.static_dir->string());
}

}  // namespace vna::service
