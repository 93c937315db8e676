// Copyright 2026 The attn-nmt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against the OpenMP versions.
//
//   ATTN_NMT_THREADS=4 ./kernels_bench

#include <benchmark/benchmark.h>

#include <vector>

#include "nmt/kernels.hpp"
#include "nmt/random.hpp"

namespace {

using GemmFn = void (*)(std::size_t, std::size_t, std::size_t, std::span<const double>,
                        std::span<const double>, std::span<double>, bool);

std::vector<double> filled(std::size_t n, std::uint64_t seed) {
  nmt::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Square problems of side `state.range(0)`.
void run_gemm(benchmark::State& state, GemmFn fn) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n * n, 1);
  const auto b = filled(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    fn(n, n, n, a, b, c, false);
    benchmark::DoNotOptimize(c.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}

void BM_GemmNN_Serial(benchmark::State& s) { run_gemm(s, nmt::kernels::serial::gemm_nn); }
void BM_GemmNN_OpenMP(benchmark::State& s) { run_gemm(s, nmt::kernels::gemm_nn); }
void BM_GemmNT_Serial(benchmark::State& s) { run_gemm(s, nmt::kernels::serial::gemm_nt); }
void BM_GemmNT_OpenMP(benchmark::State& s) { run_gemm(s, nmt::kernels::gemm_nt); }
void BM_GemmTN_Serial(benchmark::State& s) { run_gemm(s, nmt::kernels::serial::gemm_tn); }
void BM_GemmTN_OpenMP(benchmark::State& s) { run_gemm(s, nmt::kernels::gemm_tn); }

BENCHMARK(BM_GemmNN_Serial)->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_GemmNN_OpenMP)->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_GemmNT_Serial)->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_GemmNT_OpenMP)->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_GemmTN_Serial)->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(BM_GemmTN_OpenMP)->RangeMultiplier(2)->Range(32, 256);

}  // namespace

int main(int argc, char** argv) {
  nmt::kernels::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
