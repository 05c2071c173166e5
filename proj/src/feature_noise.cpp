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

#include "vna/feature.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vna/error.hpp"
#include "vna/rng.hpp"

namespace vna::feature {

namespace {

constexpr char kMagic[4] = {'V', 'N', 'A', 'F'};
constexpr std::uint32_t kVersion = 1;

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::BadIntensity, "missing rate " + std::to_string(rate) + " outside [0, 1]");
  }
}

void check_range(const FeatureSeq& fs, StepRange range) {
  if (range.first > range.last || range.last > fs.steps) {
    throw Error(ErrorCode::RangeOutOfBounds,
                "timestep range [" + std::to_string(range.first) + ", " + std::to_string(range.last) +
                    ") over " + std::to_string(fs.steps) + " steps");
  }
}

void drop_step(FeatureSeq& fs, std::size_t t) {
  auto r = fs.row(t);
  std::fill(r.begin(), r.end(), 0.0f);
  fs.mask[t] = 0;
}

template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) {
    throw Error(ErrorCode::ParseError, path.string() + ": truncated header");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

}  // namespace

std::size_t structural_block_length(double missing_rate, std::size_t steps) {
  if (missing_rate >= 1.0) return steps;
  const auto n = static_cast<std::size_t>(std::floor(missing_rate * static_cast<double>(steps) + 0.5));
  return std::min(n, steps);
}

FeatureSeq random_drop(const FeatureSeq& fs, double missing_rate, std::uint64_t seed) {
  return random_drop(fs, StepRange{0, fs.steps}, missing_rate, seed);
}

FeatureSeq random_drop(const FeatureSeq& fs, StepRange range, double missing_rate, std::uint64_t seed) {
  check_rate(missing_rate);
  check_range(fs, range);
  FeatureSeq out = fs;
  if (missing_rate == 0.0) return out;
  const CounterRng rng(seed);
  for (std::size_t t = range.first; t < range.last; ++t) {
    if (out.mask[t] && rng.uniform(t) < missing_rate) drop_step(out, t);
  }
  return out;
}

FeatureSeq structural_drop(const FeatureSeq& fs, double missing_rate, std::uint64_t seed) {
  return structural_drop(fs, StepRange{0, fs.steps}, missing_rate, seed);
}

FeatureSeq structural_drop(const FeatureSeq& fs, StepRange range, double missing_rate,
                           std::uint64_t seed) {
  check_rate(missing_rate);
  check_range(fs, range);
  FeatureSeq out = fs;
  const std::size_t n = range.last - range.first;
  const std::size_t block = structural_block_length(missing_rate, n);
  if (block == 0) return out;
  const std::size_t start = range.first + static_cast<std::size_t>(CounterRng(seed).below(0, n - block + 1));
  for (std::size_t t = start; t < start + block; ++t) drop_step(out, t);
  return out;
}

FeatureSeq apply_item(const FeatureSeq& fs, const NoiseItem& item, std::uint64_t item_seed) {
  StepRange range;
  if (item.index_addressed()) {
    range.first = static_cast<std::size_t>(std::llround(item.start_s));
    range.last = static_cast<std::size_t>(std::llround(item.end_s));
  } else {
    const double rate = item.params.at("rate").get<double>();
    range.first = static_cast<std::size_t>(std::floor(item.start_s * rate + 1e-9));
    range.last = static_cast<std::size_t>(std::ceil(item.end_s * rate - 1e-9));
  }
  range.last = std::min(range.last, fs.steps);
  range.first = std::min(range.first, range.last);
  switch (item.kind) {
    case NoiseKind::random_drop: return random_drop(fs, range, item.intensity, item_seed);
    case NoiseKind::structural_drop: return structural_drop(fs, range, item.intensity, item_seed);
    default:
      throw Error(ErrorCode::UnknownKind, "'" + std::string(name_of(item.kind)) + "' is not a feature kind");
  }
}

void save(const std::filesystem::path& path, const FeatureSeq& fs) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
    os.write(kMagic, 4);
    write_le<std::uint32_t>(os, kVersion);
    write_le<std::uint64_t>(os, fs.steps);
    write_le<std::uint64_t>(os, fs.dims);
    for (float v : fs.values) {
      std::uint32_t u = 0;
      std::memcpy(&u, &v, 4);
      write_le<std::uint32_t>(os, u);
    }
    os.write(reinterpret_cast<const char*>(fs.mask.data()), static_cast<std::streamsize>(fs.mask.size()));
  }
  nlohmann::ordered_json side;
  side["modality"] = fs.modality;
  side["steps"] = fs.steps;
  side["dims"] = fs.dims;
  side["provenance"] = fs.provenance.is_null() ? nlohmann::ordered_json::object()
                                               : nlohmann::ordered_json::parse(fs.provenance.dump());
  std::ofstream js(sidecar(path), std::ios::binary);
  js << side.dump(2) << '\n';
}

FeatureSeq load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": not a feature container");
  }
  const auto version = read_le<std::uint32_t>(is, path);
  if (version != kVersion) {
    throw Error(ErrorCode::ParseError, path.string() + ": unsupported version " + std::to_string(version));
  }
  FeatureSeq fs;
  fs.steps = read_le<std::uint64_t>(is, path);
  fs.dims = read_le<std::uint64_t>(is, path);
  fs.values.resize(fs.steps * fs.dims);
  for (auto& v : fs.values) {
    const auto u = read_le<std::uint32_t>(is, path);
    std::memcpy(&v, &u, 4);
  }
  fs.mask.resize(fs.steps);
  if (!is.read(reinterpret_cast<char*>(fs.mask.data()), static_cast<std::streamsize>(fs.steps))) {
    throw Error(ErrorCode::ParseError, path.string() + ": truncated mask");
  }
  fs.modality = "feature";
  if (std::ifstream js(sidecar(path), std::ios::binary); js) {
    const std::string text((std::istreambuf_iterator<char>(js)), std::istreambuf_iterator<char>());
    const auto j = parse_json_text(text, sidecar(path).string());
    fs.modality = j.value("modality", fs.modality);
    if (j.contains("provenance") && !j["provenance"].empty()) fs.provenance = j["provenance"];
  }
  return fs;
}

}  // namespace vna::feature
