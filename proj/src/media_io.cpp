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

#include "vna/media_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <deque>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "vna/audio_io.hpp"
#include "vna/error.hpp"
#include "vna/subprocess.hpp"
#include "vna/video.hpp"

namespace vna::media {

namespace fs = std::filesystem;

namespace {

template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

  bool push(T value) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_ || finished_; });
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return v;
  }

  // Producer is done; consumers drain what is queued.
  void finish() {
    std::lock_guard lock(mutex_);
    finished_ = true;
    not_empty_.notify_all();
  }

  // Tear down: wake everyone, drop queued items.
  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    items_.clear();
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  bool closed_ = false;
  bool finished_ = false;
};

struct IndexedFrame {
  std::size_t index = 0;
  Frame frame;
};

class TempDir {
 public:
  TempDir() {
    auto tmpl = (fs::temp_directory_path() / "vna-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw Error(ErrorCode::Io, "cannot create temp dir");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

bool is_executable(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::string lower_ext(const fs::path& p) {
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

std::string fps_arg(double fps) {
  for (const double scale : {1.0, 1.001}) {
    const double n = std::round(fps * scale);
    if (std::abs(n / scale - fps) < 0.005 && n > 0) {
      char buf[64];
      if (scale == 1.0) {
        std::snprintf(buf, sizeof buf, "%.0f", n);
      } else {
        std::snprintf(buf, sizeof buf, "%.0f/1001", n * 1000.0);
      }
      return buf;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", fps);
  return buf;
}

int channel_count(const std::string& layout) {
  static const std::regex n_channels(R"((\d+) channels)");
  std::smatch m;
  if (std::regex_search(layout, m, n_channels)) return std::stoi(m[1]);
  if (layout.rfind("mono", 0) == 0) return 1;
  if (layout.rfind("stereo", 0) == 0 || layout.rfind("downmix", 0) == 0) return 2;
  static const std::regex surround(R"(^(\d+)\.(\d+))");
  if (std::regex_search(layout, m, surround)) return std::stoi(m[1]) + std::stoi(m[2]);
  if (layout.rfind("quad", 0) == 0) return 4;
  return 0;
}

void write_bytes(std::ofstream* out, const void* data, std::size_t n) {
  if (out != nullptr) out->write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

std::vector<float> interleave(const audio::PcmBuffer& buf) {
  const std::size_t n = buf.samples();
  const std::size_t ch = buf.channels.size();
  std::vector<float> out(n * ch);
  for (std::size_t c = 0; c < ch; ++c) {
    for (std::size_t i = 0; i < n; ++i) out[i * ch + c] = buf.channels[c][i];
  }
  return out;
}

std::vector<std::string> codec_args(const fs::path& output, bool lossless, bool has_video,
                                    bool has_audio, int width, int height) {
  const auto ext = lower_ext(output);
  std::vector<std::string> a;
  if (lossless) {
    if (ext != ".mkv" && ext != ".mka" && ext != ".nut") {
      throw Error(ErrorCode::EncodeError, "lossless output needs a .mkv/.mka/.nut container, got '" +
                                              output.filename().string() + "'");
    }
    if (has_video) a.insert(a.end(), {"-c:v", "ffv1", "-level", "3", "-pix_fmt", "bgr0"});
    if (has_audio) a.insert(a.end(), {"-c:a", "pcm_f32le"});
    return a;
  }
  const bool h264_family = ext == ".mp4" || ext == ".mov" || ext == ".m4v" || ext == ".mkv";
  if (h264_family) {
    const bool even = width % 2 == 0 && height % 2 == 0;
    if (has_video) {
      a.insert(a.end(), {"-c:v", "libx264", "-preset", "veryfast", "-crf", "18", "-pix_fmt",
                         even ? "yuv420p" : "yuv444p"});
    }
    if (has_audio) a.insert(a.end(), {"-c:a", "aac", "-b:a", "192k"});
  }
  return a;
}

}  // namespace

std::string transcoder() {
  if (const char* env = std::getenv(kTranscoderEnv); env != nullptr && *env != '\0') {
    if (!is_executable(env)) {
      throw Error(ErrorCode::TranscoderMissing,
                  std::string(kTranscoderEnv) + "='" + env + "' is not an executable file");
    }
    return env;
  }
  if (const char* path = std::getenv("PATH"); path != nullptr) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      if (dir.empty()) continue;
      const auto candidate = fs::path(dir) / "ffmpeg";
      if (is_executable(candidate)) return candidate.string();
    }
  }
  throw Error(ErrorCode::TranscoderMissing,
              std::string("ffmpeg not found on PATH; set ") + kTranscoderEnv);
}

MediaMeta parse_probe_output(const std::string& text) {
  MediaMeta meta;
  std::smatch m;
  static const std::regex input(R"(Input #0, ([^,]+)[^\n]*, from ')");
  if (!std::regex_search(text, m, input)) {
    throw Error(ErrorCode::UnreadableMedia, "no input stream summary");
  }
  meta.container = m[1];
  static const std::regex duration(R"(Duration: (\d+):(\d+):(\d+(?:\.\d+)?))");
  if (std::regex_search(text, m, duration)) {
    meta.duration_s = std::stod(m[1]) * 3600.0 + std::stod(m[2]) * 60.0 + std::stod(m[3]);
  }

  std::istringstream lines(text);
  std::string line;
  static const std::regex size(R"(, (\d+)x(\d+)[ ,\[])");
  static const std::regex fps(R"(, ([\d.]+)(k?) fps)");
  static const std::regex tbr(R"(, ([\d.]+)(k?) tbr)");
  static const std::regex audio(R"((\d+) Hz, ([^,]+))");
  while (std::getline(lines, line)) {
    if (line.find("Stream #0:") == std::string::npos) continue;
    if (!meta.has_video && line.find(": Video: ") != std::string::npos &&
        line.find("(attached pic)") == std::string::npos) {
      const std::string tail = line + " ";
      if (!std::regex_search(tail, m, size)) continue;
      meta.width = std::stoi(m[1]);
      meta.height = std::stoi(m[2]);
      if (std::regex_search(line, m, fps) || std::regex_search(line, m, tbr)) {
        meta.fps = std::stod(m[1]) * (m[2].length() > 0 ? 1000.0 : 1.0);
      }
      meta.has_video = meta.width > 0 && meta.height > 0 && meta.fps > 0;
    } else if (!meta.has_audio && line.find(": Audio: ") != std::string::npos) {
      if (!std::regex_search(line, m, audio)) continue;
      meta.sample_rate = std::stoi(m[1]);
      meta.channels = channel_count(m[2]);
      meta.has_audio = meta.sample_rate > 0 && meta.channels > 0;
    }
  }
  if (!meta.has_video && !meta.has_audio) {
    throw Error(ErrorCode::UnreadableMedia, "no decodable audio or video stream");
  }
  if (!meta.has_video) meta.fps = 0.0, meta.width = meta.height = 0;
  if (!(meta.duration_s > 0.0)) throw Error(ErrorCode::UnreadableMedia, "unknown duration");
  return meta;
}

MediaMeta probe(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::UnreadableMedia, "no such file: " + path.string());
  }
  const auto r = proc::run({transcoder(), "-hide_banner", "-nostdin", "-i", path.string()});
  try {
    return parse_probe_output(r.err);
  } catch (const Error& e) {
    const auto tail = r.err.size() > 600 ? r.err.substr(r.err.size() - 600) : r.err;
    throw Error(ErrorCode::UnreadableMedia, path.string() + ": " + e.what() + "\n" + tail);
  }
}

namespace {

std::vector<std::string> video_decode_args(const fs::path& path) {
  return {transcoder(), "-hide_banner", "-nostdin", "-v", "error", "-noautorotate", "-i", path.string(),
          "-map", "0:V:0", "-fps_mode", "passthrough", "-f", "rawvideo", "-pix_fmt", "rgb24", "pipe:1"};
}

// Reads one frame; false at a clean end of stream.
bool read_frame(proc::Process& dec, Frame& frame) {
  auto bytes = std::as_writable_bytes(std::span(frame.pixels));
  const std::size_t got = dec.read(bytes);
  if (got == 0) return false;
  if (got != bytes.size()) {
    throw Error(ErrorCode::PipeProtocolError, "truncated frame: " + std::to_string(got) + " of " +
                                                  std::to_string(bytes.size()) + " bytes");
  }
  return true;
}

}  // namespace

double for_each_frame(const fs::path& path, const std::function<void(const Frame&, std::size_t)>& visit) {
  const auto meta = probe(path);
  if (!meta.has_video) throw Error(ErrorCode::UnreadableMedia, path.string() + " has no video stream");
  proc::Process dec(video_decode_args(path), proc::Process::kStdout);
  Frame f(meta.width, meta.height);
  for (std::size_t i = 0; read_frame(dec, f); ++i) visit(f, i);
  if (dec.wait() != 0) throw Error(ErrorCode::UnreadableMedia, dec.stderr_tail());
  return meta.fps;
}

FrameSeq decode_video(const fs::path& path) {
  FrameSeq seq;
  seq.fps = for_each_frame(path, [&](const Frame& f, std::size_t) { seq.frames.push_back(f); });
  return seq;
}

audio::PcmBuffer decode_audio(const fs::path& path) {
  const auto meta = probe(path);
  if (!meta.has_audio) throw Error(ErrorCode::UnreadableMedia, path.string() + " has no audio stream");
  const auto r = proc::run({transcoder(), "-hide_banner", "-nostdin", "-v", "error", "-i", path.string(),
                            "-map", "0:a:0", "-ac", std::to_string(meta.channels), "-ar",
                            std::to_string(meta.sample_rate), "-c:a", "pcm_f32le", "-f", "f32le", "pipe:1"});
  if (r.exit_code != 0) throw Error(ErrorCode::UnreadableMedia, path.string() + ": " + r.err);
  const std::size_t ch = static_cast<std::size_t>(meta.channels);
  const std::size_t frame_bytes = ch * sizeof(float);
  if (r.out.size() % frame_bytes != 0) {
    throw Error(ErrorCode::PipeProtocolError, "audio stream is not a whole number of sample frames");
  }
  const std::size_t n = r.out.size() / frame_bytes;
  audio::PcmBuffer buf(meta.channels, n, meta.sample_rate);
  std::vector<float> inter(n * ch);
  std::memcpy(inter.data(), r.out.data(), r.out.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < ch; ++c) buf.channels[c][i] = inter[i * ch + c];
  }
  return buf;
}

void install_decoder(audio::AssetLibrary& assets) {
  assets.set_decoder([](const fs::path& p) { return decode_audio(p); });
}

fs::path transcript_artifact(const fs::path& output) {
  auto p = output;
  p += ".transcript.json";
  return p;
}

nlohmann::json to_json(const InjectionReport& report) {
  nlohmann::ordered_json j;
  j["input"] = report.input.string();
  j["output"] = report.output.string();
  j["transcript"] = report.transcript_path ? nlohmann::ordered_json(report.transcript_path->string())
                                           : nlohmann::ordered_json(nullptr);
  j["frames"] = report.frames;
  j["samples"] = report.samples;
  j["wall_time_s"] = report.wall_time_s;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& a : report.items) {
    nlohmann::ordered_json o;
    o["index"] = a.index;
    o["modality"] = name_of(a.item.modality);
    o["kind"] = name_of(a.item.kind);
    o["start_s"] = a.item.start_s;
    o["end_s"] = a.item.end_s;
    o["intensity"] = a.item.intensity;
    o["seed"] = a.seed;
    o["applied"] = !a.skipped;
    if (!a.note.empty()) o["note"] = a.note;
    j["items"].push_back(std::move(o));
  }
  return nlohmann::json::parse(j.dump());
}

InjectionReport inject(const fs::path& input, const fs::path& output, const ValidatedSpec& vspec,
                       const InjectOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string ff = transcoder();
  const MediaMeta meta = probe(input);
  const auto& spec = vspec.spec();

  InjectionReport report;
  report.input = input;
  report.output = output;
  std::vector<std::size_t> video_items, audio_items, text_items;
  for (std::size_t i = 0; i < spec.items.size(); ++i) {
    const auto& item = spec.items[i];
    AppliedItem a{i, item, vspec.item_seed(i), false, {}};
    switch (item.modality) {
      case Modality::video:
        if (meta.has_video) {
          video_items.push_back(i);
        } else {
          a.skipped = true, a.note = "input has no video stream";
        }
        break;
      case Modality::audio:
        if (meta.has_audio) {
          audio_items.push_back(i);
        } else {
          a.skipped = true, a.note = "input has no audio stream";
        }
        break;
      case Modality::text: text_items.push_back(i); break;
      case Modality::feature:
        a.skipped = true, a.note = "feature items apply to feature sequences, not media";
        break;
    }
    report.items.push_back(std::move(a));
  }

  if (!text_items.empty() && !options.transcript) {
    throw Error(ErrorCode::ParseError, "spec has text items but no transcript was supplied");
  }

  std::optional<std::ofstream> tap_vin, tap_vout, tap_ain, tap_aout;
  if (options.tap_dir) {
    fs::create_directories(*options.tap_dir);
    auto open = [&](std::optional<std::ofstream>& s, const char* name) {
      s.emplace(*options.tap_dir / name, std::ios::binary);
      if (!*s) throw Error(ErrorCode::Io, "cannot write tap " + (*options.tap_dir / name).string());
    };
    if (meta.has_video) open(tap_vin, "video_in.rgb"), open(tap_vout, "video_out.rgb");
    if (meta.has_audio) open(tap_ain, "audio_in.f32"), open(tap_aout, "audio_out.f32");
  }
  auto tap = [](std::optional<std::ofstream>& s) { return s ? &*s : nullptr; };

  // Text: independent of the media streams.
  if (options.transcript) {
    text::Transcript t = *options.transcript;
    for (std::size_t i : text_items) t = text::apply_item(t, spec.items[i], vspec.item_seed(i));
    report.transcript_path = transcript_artifact(output);
    text::save_transcript(*report.transcript_path, t);
  }

  TempDir tmp;
  const fs::path audio_raw = tmp.path() / "audio.f32";
  if (meta.has_audio) {
    audio::PcmBuffer pcm = decode_audio(input);
    const auto dry = interleave(pcm);
    write_bytes(tap(tap_ain), dry.data(), dry.size() * sizeof(float));
    for (std::size_t i : audio_items) {
      audio::apply_item(pcm, spec.items[i], vspec.item_seed(i), options.assets);
    }
    const auto wet = interleave(pcm);
    write_bytes(tap(tap_aout), wet.data(), wet.size() * sizeof(float));
    std::ofstream out(audio_raw, std::ios::binary);
    write_bytes(&out, wet.data(), wet.size() * sizeof(float));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + audio_raw.string());
    report.samples = pcm.samples();
  }

  std::vector<std::string> enc_args = {ff, "-hide_banner", "-nostdin", "-v", "error", "-y"};
  if (meta.has_video) {
    enc_args.insert(enc_args.end(), {"-f", "rawvideo", "-pix_fmt", "rgb24", "-s",
                                     std::to_string(meta.width) + "x" + std::to_string(meta.height),
                                     "-framerate", fps_arg(meta.fps), "-i", "pipe:0"});
  }
  if (meta.has_audio) {
    enc_args.insert(enc_args.end(), {"-f", "f32le", "-ar", std::to_string(meta.sample_rate), "-ac",
                                     std::to_string(meta.channels), "-i", audio_raw.string()});
  }
  if (meta.has_video) enc_args.insert(enc_args.end(), {"-map", "0:v"});
  if (meta.has_audio) enc_args.insert(enc_args.end(), {"-map", meta.has_video ? "1:a" : "0:a"});
  const auto codecs = codec_args(output, options.lossless, meta.has_video, meta.has_audio, meta.width,
                                 meta.height);
  enc_args.insert(enc_args.end(), codecs.begin(), codecs.end());
  enc_args.insert(enc_args.end(),
                  {"-fflags", "+bitexact", "-flags:v", "+bitexact", "-flags:a", "+bitexact", output.string()});

  if (!meta.has_video) {
    const auto r = proc::run(enc_args);
    if (r.exit_code != 0) throw Error(ErrorCode::EncodeError, r.err);
  } else {
    proc::Process dec(video_decode_args(input), proc::Process::kStdout);
    proc::Process enc(enc_args, proc::Process::kStdin);

    constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t i : video_items) {
      const auto& it = spec.items[i];
      ranges.push_back(video::frame_range({it.start_s, it.end_s}, meta.fps, kUnbounded));
    }

    BoundedQueue<IndexedFrame> decoded(options.queue_depth), noised(options.queue_depth);
    std::mutex err_mutex;
    std::exception_ptr failure;
    auto fail = [&](std::exception_ptr e) {
      {
        std::lock_guard lock(err_mutex);
        if (!failure) failure = e;
      }
      decoded.close();
      noised.close();
    };

    std::thread reader([&] {
      try {
        for (std::size_t idx = 0;; ++idx) {
          IndexedFrame f{idx, Frame(meta.width, meta.height)};
          if (!read_frame(dec, f.frame)) break;
          if (!decoded.push(std::move(f))) return;
        }
        decoded.finish();
      } catch (...) {
        fail(std::current_exception());
      }
    });
    std::thread worker([&] {
      try {
        while (auto f = decoded.pop()) {
          write_bytes(tap(tap_vin), f->frame.pixels.data(), f->frame.pixels.size());
          for (std::size_t k = 0; k < video_items.size(); ++k) {
            if (f->index < ranges[k].first || f->index >= ranges[k].second) continue;
            const std::size_t i = video_items[k];
            video::apply_item(f->frame, spec.items[i], vspec.item_seed(i), f->index);
          }
          if (!noised.push(std::move(*f))) return;
        }
        noised.finish();
      } catch (...) {
        fail(std::current_exception());
      }
    });

    std::size_t frames = 0;
    try {
      while (auto f = noised.pop()) {
        write_bytes(tap(tap_vout), f->frame.pixels.data(), f->frame.pixels.size());
        if (!enc.write(std::as_bytes(std::span(f->frame.pixels)))) {
          enc.wait();
          throw Error(ErrorCode::EncodeError, "encoder closed its input\n" + enc.stderr_tail());
        }
        ++frames;
      }
    } catch (...) {
      fail(std::current_exception());
    }
    reader.join();
    worker.join();
    if (failure) std::rethrow_exception(failure);

    enc.close_stdin();
    const int dec_rc = dec.wait();
    const int enc_rc = enc.wait();
    if (dec_rc != 0) throw Error(ErrorCode::UnreadableMedia, "decoder failed\n" + dec.stderr_tail());
    if (enc_rc != 0) throw Error(ErrorCode::EncodeError, "encoder failed\n" + enc.stderr_tail());
    if (frames == 0) throw Error(ErrorCode::PipeProtocolError, "decoder produced no frames");
    report.frames = frames;
  }

  for (auto* s : {tap(tap_vin), tap(tap_vout), tap(tap_ain), tap(tap_aout)}) {
    if (s != nullptr && !s->flush()) throw Error(ErrorCode::Io, "tap write failed");
  }
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace vna::media
