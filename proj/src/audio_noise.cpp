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

#include "vna/audio.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>

#include "vna/audio_io.hpp"
#include "vna/error.hpp"
#include "vna/kernels.hpp"
#include "vna/rng.hpp"

namespace vna::audio {

namespace {

constexpr double kTickEps = 1e-9;

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

Plan plan_r2c(int n, double* in, fftw_complex* out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE));
}

Plan plan_c2r(int n, fftw_complex* in, double* out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void check_intensity(double intensity) {
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw Error(ErrorCode::BadIntensity, "intensity " + std::to_string(intensity));
  }
}

std::vector<float> velvet(std::size_t n, int sample_rate, std::uint64_t seed) {
  std::vector<float> out(n, 0.0f);
  const double period = sample_rate / kVelvetDensity;
  const CounterRng rng(seed);
  std::size_t count = 0;
  // One impulse per integer slot [floor(m T), floor((m + 1) T)), so slots never share a sample.
  for (std::uint64_t m = 0;; ++m) {
    const auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(m) * period));
    const auto hi = static_cast<std::size_t>(std::floor(static_cast<double>(m + 1) * period));
    const std::size_t idx = lo + static_cast<std::size_t>(rng.below(2 * m, hi - lo));
    if (idx >= n) break;
    out[idx] = rng.uniform(2 * m + 1) < 0.5 ? -1.0f : 1.0f;
    ++count;
  }
  if (count > 0) {
    const float scale = static_cast<float>(std::sqrt(static_cast<double>(n) / count));
    for (auto& v : out) v *= scale;
  }
  return out;
}

std::vector<float> shaped_noise(double beta, std::size_t n, int sample_rate, std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<double> white(n);
  for (std::size_t i = 0; i < n; ++i) white[i] = rng.normal(i);

  std::vector<float> out(n);
  if (beta != 0.0 && n >= 2) {
    const std::size_t bins = n / 2 + 1;
    auto time = fftw_buffer<double>(n);
    auto freq = fftw_buffer<fftw_complex>(bins);
    const Plan fwd = plan_r2c(static_cast<int>(n), time.get(), freq.get());
    const Plan inv = plan_c2r(static_cast<int>(n), freq.get(), time.get());
    std::copy(white.begin(), white.end(), time.get());
    fftw_execute(fwd.get());
    freq[0][0] = freq[0][1] = 0.0;
    for (std::size_t k = 1; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
      const double g = std::pow(f, -beta / 2.0);
      freq[k][0] *= g;
      freq[k][1] *= g;
    }
    fftw_execute(inv.get());
    std::copy(time.get(), time.get() + n, white.begin());
  }
  double energy = 0.0;
  for (double v : white) energy += v * v;
  const double scale = energy > 0.0 ? std::sqrt(static_cast<double>(n) / energy) : 0.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(white[i] * scale);
  return out;
}

}  // namespace

double rms(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

std::pair<std::size_t, std::size_t> sample_range(const PcmBuffer& buf, Segment seg) {
  const double fs = buf.sample_rate;
  const auto n = static_cast<double>(buf.samples());
  if (!(seg.start_s >= 0.0) || !(seg.end_s > seg.start_s)) {
    throw Error(ErrorCode::SegmentOutOfRange, "segment [" + std::to_string(seg.start_s) + ", " +
                                                  std::to_string(seg.end_s) + ") is empty or negative");
  }
  const double a = std::floor(seg.start_s * fs + kTickEps);
  double b = std::ceil(seg.end_s * fs - kTickEps);
  if (a >= n || b > n + 1.0) {
    throw Error(ErrorCode::SegmentOutOfRange,
                "segment [" + std::to_string(seg.start_s) + ", " + std::to_string(seg.end_s) +
                    ") exceeds buffer of " + std::to_string(buf.duration_s()) + " s");
  }
  b = std::min(b, n);
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

double insulation_cutoff_hz(double intensity) { return 4000.0 - 3700.0 * intensity; }

double reverb_rt60_s(ReverbStyle style) { return style == ReverbStyle::hall ? 1.5 : 0.4; }

double color_exponent(NoiseColor color) {
  switch (color) {
    case NoiseColor::white: return 0.0;
    case NoiseColor::pink: return 1.0;
    case NoiseColor::brown: return 2.0;
    case NoiseColor::blue: return -1.0;
    case NoiseColor::violet: return -2.0;
    case NoiseColor::velvet: return 0.0;
  }
  return 0.0;
}

std::vector<float> lowpass_taps(double cutoff_hz, int sample_rate, int n_taps) {
  const double fc = std::min(cutoff_hz, 0.5 * sample_rate) / sample_rate;  // cycles/sample
  const int m = n_taps - 1;
  std::vector<double> h(static_cast<std::size_t>(n_taps));
  double sum = 0.0;
  for (int i = 0; i < n_taps; ++i) {
    const double t = i - m / 2.0;
    const double sinc = t == 0.0 ? 2.0 * fc
                                 : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
    const double window = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * i / m) +
                          0.08 * std::cos(4.0 * std::numbers::pi * i / m);
    h[i] = sinc * window;
    sum += h[i];
  }
  std::vector<float> taps(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) taps[i] = static_cast<float>(h[i] / sum);
  return taps;
}

std::vector<float> convolve_fft(std::span<const float> x, std::span<const float> h, std::size_t n_out) {
  std::vector<float> y(n_out, 0.0f);
  if (h.empty() || x.empty() || n_out == 0) return y;
  const std::size_t k = h.size();
  const std::size_t nfft = next_pow2(2 * k);
  const std::size_t block = nfft - k + 1;
  const std::size_t bins = nfft / 2 + 1;

  auto time = fftw_buffer<double>(nfft);
  auto freq = fftw_buffer<fftw_complex>(bins);
  auto hfreq = fftw_buffer<fftw_complex>(bins);
  const Plan fwd = plan_r2c(static_cast<int>(nfft), time.get(), freq.get());
  const Plan inv = plan_c2r(static_cast<int>(nfft), freq.get(), time.get());

  std::fill_n(time.get(), nfft, 0.0);
  std::copy(h.begin(), h.end(), time.get());
  fftw_execute(fwd.get());
  std::memcpy(hfreq.get(), freq.get(), sizeof(fftw_complex) * bins);

  std::vector<double> acc(n_out, 0.0);
  const double norm = 1.0 / static_cast<double>(nfft);
  for (std::size_t start = 0; start < x.size() && start < n_out; start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    std::fill_n(time.get(), nfft, 0.0);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), len, time.get());
    fftw_execute(fwd.get());
    for (std::size_t b = 0; b < bins; ++b) {
      const std::complex<double> a(freq[b][0], freq[b][1]);
      const std::complex<double> g(hfreq[b][0], hfreq[b][1]);
      const auto p = a * g;
      freq[b][0] = p.real();
      freq[b][1] = p.imag();
    }
    fftw_execute(inv.get());
    const std::size_t stop = std::min(n_out, start + nfft);
    for (std::size_t i = start; i < stop; ++i) acc[i] += time[i - start] * norm;
  }
  for (std::size_t i = 0; i < n_out; ++i) y[i] = static_cast<float>(acc[i]);
  return y;
}

std::vector<float> convolve(std::span<const float> x, std::span<const float> h, std::size_t n_out) {
  if (h.size() > kFftConvolutionThreshold) return convolve_fft(x, h, n_out);
  std::vector<float> y(n_out, 0.0f);
  kernels::parallel::convolve_direct(x, h, y);
  return y;
}

ImpulseResponse make_reverb_ir(ReverbStyle style, int sample_rate, std::uint64_t seed) {
  if (sample_rate <= 0) throw Error(ErrorCode::SegmentOutOfRange, "sample rate must be positive");
  ImpulseResponse ir;
  ir.sample_rate = sample_rate;
  ir.rt60_s = reverb_rt60_s(style);
  // exp(-6.91 n / (RT60 fs)) reaches -60 dB at n = RT60 * fs.
  const auto len = static_cast<std::size_t>(std::llround(ir.rt60_s * sample_rate));
  const CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(style) + 1));
  std::vector<double> h(len);
  double energy = 0.0;
  for (std::size_t n = 0; n < len; ++n) {
    h[n] = rng.normal(n) * std::exp(-6.91 * static_cast<double>(n) / (ir.rt60_s * sample_rate));
    energy += h[n] * h[n];
  }
  const double g = 1.0 / std::sqrt(energy);
  ir.taps.resize(len);
  for (std::size_t n = 0; n < len; ++n) ir.taps[n] = static_cast<float>(h[n] * g);
  return ir;
}

std::vector<float> synthesize_color(NoiseColor color, std::size_t n, int sample_rate,
                                    std::uint64_t seed) {
  if (color == NoiseColor::velvet) return velvet(n, sample_rate, seed);
  return shaped_noise(color_exponent(color), n, sample_rate, seed);
}

PcmBuffer insulate(const PcmBuffer& buf, Segment seg, double intensity) {
  check_intensity(intensity);
  const auto [first, last] = sample_range(buf, seg);
  const auto taps = lowpass_taps(insulation_cutoff_hz(intensity), buf.sample_rate);
  const std::size_t radius = taps.size() / 2;
  const auto gain = static_cast<float>(1.0 - 0.5 * intensity);
  PcmBuffer out = buf;
  for (std::size_t c = 0; c < buf.channels.size(); ++c) {
    const auto& x = buf.channels[c];
    // Segment plus `radius` samples of context on each side, zero beyond the buffer.
    const std::size_t len = last - first;
    std::vector<float> padded(len + 2 * radius, 0.0f);
    for (std::size_t i = 0; i < padded.size(); ++i) {
      const auto src = static_cast<std::ptrdiff_t>(first + i) - static_cast<std::ptrdiff_t>(radius);
      if (src >= 0 && static_cast<std::size_t>(src) < x.size()) padded[i] = x[static_cast<std::size_t>(src)];
    }
    const auto y = convolve(padded, taps, len + 2 * radius);
    for (std::size_t i = 0; i < len; ++i) {
      out.channels[c][first + i] = std::clamp(gain * y[i + 2 * radius], -1.0f, 1.0f);
    }
  }
  return out;
}

PcmBuffer mute(const PcmBuffer& buf, Segment seg, double intensity) {
  check_intensity(intensity);
  const auto [first, last] = sample_range(buf, seg);
  PcmBuffer out = buf;
  if (intensity == 0.0) return out;
  const auto gain = static_cast<float>(1.0 - intensity);
  for (auto& ch : out.channels) {
    for (std::size_t i = first; i < last; ++i) ch[i] = intensity == 1.0 ? 0.0f : ch[i] * gain;
  }
  return out;
}

PcmBuffer reverb(const PcmBuffer& buf, Segment seg, double intensity, ReverbStyle style,
                 std::uint64_t seed) {
  check_intensity(intensity);
  const auto [first, last] = sample_range(buf, seg);
  PcmBuffer out = buf;
  if (intensity == 0.0) return out;
  const auto ir = make_reverb_ir(style, buf.sample_rate, seed);
  const std::size_t len = last - first;
  const double dry_gain = 1.0 - intensity;
  for (auto& ch : out.channels) {
    const std::span<const float> dry(ch.data() + first, len);
    const auto wet = convolve(dry, ir.taps, len);
    for (std::size_t i = 0; i < len; ++i) {
      const double v = dry_gain * dry[i] + intensity * wet[i];
      ch[first + i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
  }
  return out;
}

PcmBuffer color_noise(const PcmBuffer& buf, Segment seg, double intensity, NoiseColor color,
                      std::uint64_t seed) {
  check_intensity(intensity);
  const auto [first, last] = sample_range(buf, seg);
  PcmBuffer out = buf;
  if (intensity == 0.0) return out;
  for (std::size_t c = 0; c < out.channels.size(); ++c) {
    const auto noise = synthesize_color(color, last - first, buf.sample_rate, derive_seed(seed, c));
    auto& ch = out.channels[c];
    for (std::size_t i = first; i < last; ++i) {
      const double v = ch[i] + intensity * noise[i - first];
      ch[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
  }
  return out;
}

PcmBuffer mix_scenario(const PcmBuffer& buf, Segment seg, double intensity, const PcmBuffer& asset,
                       ScenarioMode mode, std::uint64_t seed) {
  check_intensity(intensity);
  const auto [first, last] = sample_range(buf, seg);
  PcmBuffer out = buf;
  if (intensity == 0.0) return out;
  if (asset.samples() == 0 || asset.channels.empty()) {
    throw Error(ErrorCode::AssetDecodeError, "scenario asset is empty");
  }
  const std::size_t len = last - first;
  for (std::size_t c = 0; c < out.channels.size(); ++c) {
    const auto& src = asset.channels[std::min(c, asset.channels.size() - 1)];
    std::vector<float> layer(len, 0.0f);
    std::size_t offset = 0;
    if (mode == ScenarioMode::background) {
      for (std::size_t i = 0; i < len; ++i) layer[i] = src[i % src.size()];
    } else {
      const std::size_t slack = len > src.size() ? len - src.size() : 0;
      offset = static_cast<std::size_t>(CounterRng(seed).below(0, slack + 1));
      const std::size_t n = std::min(src.size(), len - offset);
      std::copy_n(src.begin(), n, layer.begin() + static_cast<std::ptrdiff_t>(offset));
    }
    const double level = mode == ScenarioMode::background ? rms(layer) : rms(src);
    if (level == 0.0) continue;
    const double gain = intensity / level;
    auto& ch = out.channels[c];
    for (std::size_t i = 0; i < len; ++i) {
      const double v = ch[first + i] + gain * layer[i];
      ch[first + i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
  }
  return out;
}

void apply_item(PcmBuffer& buf, const NoiseItem& item, std::uint64_t item_seed,
                AssetLibrary* assets) {
  // Time-addressed items may overrun decoded audio by a container rounding
  // margin; clip to what was actually decoded.
  Segment seg{item.start_s, std::min(item.end_s, buf.duration_s())};
  if (!(seg.end_s > seg.start_s)) return;
  const double s = item.intensity;
  switch (item.kind) {
    case NoiseKind::insulate: buf = insulate(buf, seg, s); break;
    case NoiseKind::mute: buf = mute(buf, seg, s); break;
    case NoiseKind::reverb_hall: buf = reverb(buf, seg, s, ReverbStyle::hall, item_seed); break;
    case NoiseKind::reverb_room: buf = reverb(buf, seg, s, ReverbStyle::room, item_seed); break;
    case NoiseKind::color_white: buf = color_noise(buf, seg, s, NoiseColor::white, item_seed); break;
    case NoiseKind::color_pink: buf = color_noise(buf, seg, s, NoiseColor::pink, item_seed); break;
    case NoiseKind::color_brown: buf = color_noise(buf, seg, s, NoiseColor::brown, item_seed); break;
    case NoiseKind::color_blue: buf = color_noise(buf, seg, s, NoiseColor::blue, item_seed); break;
    case NoiseKind::color_violet: buf = color_noise(buf, seg, s, NoiseColor::violet, item_seed); break;
    case NoiseKind::color_velvet: buf = color_noise(buf, seg, s, NoiseColor::velvet, item_seed); break;
    case NoiseKind::bg_mix:
    case NoiseKind::sudden: {
      const auto id = item.params.at("asset").get<std::string>();
      if (assets == nullptr) throw Error(ErrorCode::AssetNotFound, "no asset library for '" + id + "'");
      const auto& asset = assets->get(id, buf.sample_rate);
      const auto mode = item.kind == NoiseKind::bg_mix ? ScenarioMode::background : ScenarioMode::sudden;
      buf = mix_scenario(buf, seg, s, asset, mode, item_seed);
      break;
    }
    default:
      throw Error(ErrorCode::UnknownKind,
                  "'" + std::string(name_of(item.kind)) + "' is not an audio kind");
  }
}

std::vector<double> power_spectrum(std::span<const double> frame) {
  const int n = static_cast<int>(frame.size());
  if (n == 0) return {};
  auto in = fftw_buffer<double>(frame.size());
  auto out = fftw_buffer<fftw_complex>(frame.size() / 2 + 1);
  const auto plan = plan_r2c(n, in.get(), out.get());
  std::copy(frame.begin(), frame.end(), in.get());
  fftw_execute(plan.get());
  std::vector<double> p(frame.size() / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  return p;
}

}  // namespace vna::audio
