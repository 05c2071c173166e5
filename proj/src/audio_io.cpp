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

#include "vna/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "vna/config.hpp"
#include "vna/error.hpp"

namespace vna::audio {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

[[noreturn]] void bad_wav(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorCode::AssetDecodeError, path.string() + ": " + why);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

PcmBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::AssetNotFound, path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    bad_wav(path, "not a RIFF/WAVE file");
  }
  int format = 0, channels = 0, rate = 0, bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0 && len >= 16 && body + 16 <= bytes.size()) {
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = static_cast<int>(le32(chunk + 12));
      bits = le16(chunk + 22);
      if (format == 0xFFFE && len >= 26 && body + 26 <= bytes.size()) format = le16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = std::min(len, bytes.size() - body);
    }
    pos = body + len + (len & 1);
  }
  if (data == nullptr || channels <= 0 || rate <= 0) bad_wav(path, "missing fmt or data chunk");
  const bool is_float = format == 3 && bits == 32;
  const bool is_int = format == 1 && (bits == 16 || bits == 24 || bits == 32);
  if (!is_float && !is_int) bad_wav(path, "unsupported sample format " + std::to_string(format) + "/" + std::to_string(bits));

  const std::size_t width = static_cast<std::size_t>(bits / 8);
  const std::size_t frames = data_len / (width * static_cast<std::size_t>(channels));
  PcmBuffer buf(channels, frames, rate);
  for (std::size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const unsigned char* p = data + (i * static_cast<std::size_t>(channels) + c) * width;
      float v = 0.0f;
      if (is_float) {
        const std::uint32_t u = le32(p);
        std::memcpy(&v, &u, 4);
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(le16(p)) / 32768.0f;
      } else if (bits == 24) {
        std::int32_t s = p[0] | p[1] << 8 | p[2] << 16;
        if (s & 0x800000) s -= 0x1000000;
        v = static_cast<float>(s / 8388608.0);
      } else {
        v = static_cast<float>(static_cast<std::int32_t>(le32(p)) / 2147483648.0);
      }
      buf.channels[static_cast<std::size_t>(c)][i] = v;
    }
  }
  return buf;
}

void write_wav(const std::filesystem::path& path, const PcmBuffer& buf, WavFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const auto channels = static_cast<std::uint16_t>(buf.channel_count());
  const std::uint16_t bits = format == WavFormat::float32 ? 32 : 16;
  const std::uint32_t data_len = static_cast<std::uint32_t>(buf.samples() * channels * (bits / 8));
  os.write("RIFF", 4);
  put32(os, 36 + data_len);
  os.write("WAVEfmt ", 8);
  put32(os, 16);
  put16(os, format == WavFormat::float32 ? 3 : 1);
  put16(os, channels);
  put32(os, static_cast<std::uint32_t>(buf.sample_rate));
  put32(os, static_cast<std::uint32_t>(buf.sample_rate) * channels * (bits / 8));
  put16(os, static_cast<std::uint16_t>(channels * (bits / 8)));
  put16(os, bits);
  os.write("data", 4);
  put32(os, data_len);
  for (std::size_t i = 0; i < buf.samples(); ++i) {
    for (const auto& ch : buf.channels) {
      if (format == WavFormat::float32) {
        std::uint32_t u = 0;
        std::memcpy(&u, &ch[i], 4);
        put32(os, u);
      } else {
        const float v = std::clamp(ch[i], -1.0f, 1.0f);
        put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(v * 32767.0f))));
      }
    }
  }
}

PcmBuffer resample(const PcmBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorCode::AssetDecodeError, "target sample rate must be positive");
  if (buf.sample_rate == target_rate) return buf;
  const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // fraction of the source Nyquist
  constexpr int kZeroCrossings = 16;
  const double half_width = kZeroCrossings / cutoff;  // in source samples
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(buf.samples()) * ratio));
  PcmBuffer out(buf.channel_count(), n_out, target_rate);
  for (std::size_t c = 0; c < buf.channels.size(); ++c) {
    const auto& x = buf.channels[c];
    const auto n_in = static_cast<std::int64_t>(x.size());
    for (std::size_t j = 0; j < n_out; ++j) {
      const double t = static_cast<double>(j) / ratio;
      const auto lo = static_cast<std::int64_t>(std::ceil(t - half_width));
      const auto hi = static_cast<std::int64_t>(std::floor(t + half_width));
      double acc = 0.0;
      for (std::int64_t i = std::max<std::int64_t>(lo, 0); i <= std::min(hi, n_in - 1); ++i) {
        const double d = t - static_cast<double>(i);
        const double window = 0.5 + 0.5 * std::cos(std::numbers::pi * d / half_width);
        acc += x[static_cast<std::size_t>(i)] * cutoff * sinc(cutoff * d) * window;
      }
      out.channels[c][j] = static_cast<float>(acc);
    }
  }
  return out;
}

AssetLibrary::AssetLibrary(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error(ErrorCode::AssetNotFound, "asset manifest " + manifest.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto j = parse_json_text(text, manifest.string());
  if (!j.contains("assets") || !j["assets"].is_array()) {
    throw Error(ErrorCode::ParseError, manifest.string() + ": 'assets' array required");
  }
  const auto base = manifest.parent_path();
  for (const auto& a : j["assets"]) {
    if (!a.contains("id") || !a.contains("path")) {
      throw Error(ErrorCode::ParseError, manifest.string() + ": asset needs id and path");
    }
    AssetEntry e;
    e.id = a["id"].get<std::string>();
    e.path = a["path"].get<std::string>();
    if (e.path.is_relative()) e.path = base / e.path;
    e.license = a.value("license", std::string());
    add(std::move(e));
  }
}

void AssetLibrary::add(AssetEntry entry) {
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

const PcmBuffer& AssetLibrary::get(const std::string& id, int sample_rate) {
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(id, sample_rate);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const auto entry = std::find_if(entries_.begin(), entries_.end(),
                                  [&](const AssetEntry& e) { return e.id == id; });
  if (entry == entries_.end()) throw Error(ErrorCode::AssetNotFound, "asset id '" + id + "'");
  if (!std::filesystem::exists(entry->path)) {
    throw Error(ErrorCode::AssetNotFound, "asset '" + id + "' at " + entry->path.string());
  }
  PcmBuffer decoded;
  auto ext = entry->path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (ext == ".wav") {
    decoded = read_wav(entry->path);
  } else if (decoder_) {
    decoded = decoder_(entry->path);
  } else {
    throw Error(ErrorCode::AssetDecodeError, "no decoder for " + entry->path.string());
  }
  return cache_.emplace(key, resample(decoded, sample_rate)).first->second;
}

}  // namespace vna::audio
