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

// Audio perturbations on planar float PCM. Every operation leaves samples
// outside its segment bit-identical, preserves length, and clamps the
// result to [-1, 1].

#ifndef VNA_AUDIO_HPP
#define VNA_AUDIO_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vna/config.hpp"

namespace vna::audio {

struct PcmBuffer {
  std::vector<std::vector<float>> channels;
  int sample_rate = 16000;

  PcmBuffer() = default;
  PcmBuffer(int n_channels, std::size_t n_samples, int rate)
      : channels(static_cast<std::size_t>(n_channels), std::vector<float>(n_samples, 0.0f)),
        sample_rate(rate) {}

  std::size_t samples() const { return channels.empty() ? 0 : channels.front().size(); }
  int channel_count() const { return static_cast<int>(channels.size()); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples()) / sample_rate : 0.0;
  }

  bool operator==(const PcmBuffer&) const = default;
};

struct ImpulseResponse {
  std::vector<float> taps;
  int sample_rate = 0;
  double rt60_s = 0.0;
};

struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
};

/// Sample range [first, last) of a segment: floor at the start, ceil at the
/// end. Throws SegmentOutOfRange if the segment is empty or leaves the buffer
/// by more than one sample.
std::pair<std::size_t, std::size_t> sample_range(const PcmBuffer& buf, Segment seg);

enum class ReverbStyle { hall, room };
enum class NoiseColor { white, pink, brown, blue, violet, velvet };
enum class ScenarioMode { background, sudden };

inline constexpr int kInsulationTaps = 255;
inline constexpr double kVelvetDensity = 2205.0;  // impulses per second
inline constexpr std::size_t kFftConvolutionThreshold = 4096;

double insulation_cutoff_hz(double intensity);
double reverb_rt60_s(ReverbStyle style);
/// PSD exponent beta (PSD ~ f^-beta); velvet reports 0.
double color_exponent(NoiseColor color);

/// Blackman-windowed sinc low-pass with unit DC gain.
std::vector<float> lowpass_taps(double cutoff_hz, int sample_rate, int n_taps = kInsulationTaps);

/// y[n] = sum_k h[k] x[n-k] for n < n_out. Direct form below
/// kFftConvolutionThreshold taps, FFT overlap-add above.
std::vector<float> convolve(std::span<const float> x, std::span<const float> h, std::size_t n_out);
std::vector<float> convolve_fft(std::span<const float> x, std::span<const float> h, std::size_t n_out);

ImpulseResponse make_reverb_ir(ReverbStyle style, int sample_rate, std::uint64_t seed);

/// Unit-RMS noise of the given color, n samples at sample_rate.
std::vector<float> synthesize_color(NoiseColor color, std::size_t n, int sample_rate,
                                    std::uint64_t seed);

PcmBuffer insulate(const PcmBuffer& buf, Segment seg, double intensity);
PcmBuffer mute(const PcmBuffer& buf, Segment seg, double intensity);
PcmBuffer reverb(const PcmBuffer& buf, Segment seg, double intensity, ReverbStyle style,
                 std::uint64_t seed);
PcmBuffer color_noise(const PcmBuffer& buf, Segment seg, double intensity, NoiseColor color,
                      std::uint64_t seed);
/// `asset` must already be at buf.sample_rate (see AssetLibrary).
PcmBuffer mix_scenario(const PcmBuffer& buf, Segment seg, double intensity, const PcmBuffer& asset,
                       ScenarioMode mode, std::uint64_t seed);

class AssetLibrary;

/// Applies one validated audio item in place.
void apply_item(PcmBuffer& buf, const NoiseItem& item, std::uint64_t item_seed,
                AssetLibrary* assets);

double rms(std::span<const float> x);

/// |X_k|^2 for k = 0..n/2 of a real frame.
std::vector<double> power_spectrum(std::span<const double> frame);

}  // namespace vna::audio

#endif  // VNA_AUDIO_HPP
