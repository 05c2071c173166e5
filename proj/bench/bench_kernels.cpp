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

// Serial reference vs OpenMP kernels on a 640x480 frame and a 10 s / 16 kHz
// signal. Run with OMP_NUM_THREADS set to compare scaling.

#include <benchmark/benchmark.h>

#include <vector>

#include "vna/kernels.hpp"
#include "vna/rng.hpp"
#include "vna/video.hpp"

namespace {

vna::Frame test_frame() {
  vna::Frame f(640, 480);
  const vna::CounterRng rng(7);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(rng.below(i, 256));
  return f;
}

std::vector<float> test_signal(std::size_t n, std::uint64_t key) {
  const vna::CounterRng rng(key);
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<float>(0.1 * rng.normal(i));
  return x;
}

template <auto Kernel>
void BM_GaussianBlur(benchmark::State& state) {
  const auto in = test_frame();
  const auto taps = vna::video::gaussian_taps(static_cast<double>(state.range(0)));
  vna::Frame out;
  for (auto _ : state) {
    Kernel(in, out, taps);
    benchmark::DoNotOptimize(out.pixels.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.pixel_count()));
}

template <auto Kernel>
void BM_AddGaussian(benchmark::State& state) {
  auto frame = test_frame();
  for (auto _ : state) {
    Kernel(frame, 11, 25.5);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frame.pixels.size()));
}

template <auto Kernel>
void BM_SaltPepper(benchmark::State& state) {
  auto frame = test_frame();
  for (auto _ : state) {
    Kernel(frame, 11, 0.1);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frame.pixel_count()));
}

template <auto Kernel>
void BM_ConvolveDirect(benchmark::State& state) {
  const auto x = test_signal(160000, 1);
  const auto h = test_signal(static_cast<std::size_t>(state.range(0)), 2);
  std::vector<float> y(x.size());
  for (auto _ : state) {
    Kernel(x, h, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(y.size()));
}

}  // namespace

BENCHMARK(BM_GaussianBlur<vna::kernels::serial::convolve_separable>)->Arg(2)->Arg(5)->Name("gaussian_blur/serial");
BENCHMARK(BM_GaussianBlur<vna::kernels::parallel::convolve_separable>)->Arg(2)->Arg(5)->Name("gaussian_blur/omp");
BENCHMARK(BM_AddGaussian<vna::kernels::serial::add_gaussian>)->Name("add_gaussian/serial");
BENCHMARK(BM_AddGaussian<vna::kernels::parallel::add_gaussian>)->Name("add_gaussian/omp");
BENCHMARK(BM_SaltPepper<vna::kernels::serial::salt_pepper>)->Name("salt_pepper/serial");
BENCHMARK(BM_SaltPepper<vna::kernels::parallel::salt_pepper>)->Name("salt_pepper/omp");
BENCHMARK(BM_ConvolveDirect<vna::kernels::serial::convolve_direct>)->Arg(255)->Name("convolve_direct/serial");
BENCHMARK(BM_ConvolveDirect<vna::kernels::parallel::convolve_direct>)->Arg(255)->Name("convolve_direct/omp");

BENCHMARK_MAIN();
