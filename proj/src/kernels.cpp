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

#include "nmt/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "nmt/error.hpp"

namespace nmt::kernels {
namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1 << 15;
constexpr std::size_t kColumnBlock = 64;

int g_threads = 1;

bool go_parallel(std::size_t m, std::size_t n, std::size_t k) {
  return g_threads > 1 && m * n * k >= kParallelWork;
}

void check_sizes(std::size_t m, std::size_t n, std::size_t k, std::size_t a,
                 std::size_t b, std::size_t c) {
  if (a < m * k || b < n * k || c < m * n) {
    throw DimensionError("gemm operand too small for " + std::to_string(m) +
                         "x" + std::to_string(k) + " * " + std::to_string(k) +
                         "x" + std::to_string(n));
  }
}

// Columns [j0, j1) of C = A·B. Per element: c, then += a[i,p]·b[p,j] for
// p = 0..k-1.
inline void nn_columns(std::size_t m, std::size_t n, std::size_t k,
                       const double* a, const double* b, double* c,
                       bool accumulate, std::size_t j0, std::size_t j1) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    if (!accumulate) std::fill(ci + j0, ci + j1, 0.0);
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      const double* bp = b + p * n;
      for (std::size_t j = j0; j < j1; ++j) ci[j] += aip * bp[j];
    }
  }
}

// Columns [j0, j1) of C = A·Bᵀ, four independent dot products at a time.
inline void nt_columns(std::size_t m, std::size_t n, std::size_t k,
                       const double* a, const double* b, double* c,
                       bool accumulate, std::size_t j0, std::size_t j1) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    std::size_t j = j0;
    for (; j + 4 <= j1; j += 4) {
      const double* b0 = b + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      double s0 = accumulate ? ci[j] : 0.0;
      double s1 = accumulate ? ci[j + 1] : 0.0;
      double s2 = accumulate ? ci[j + 2] : 0.0;
      double s3 = accumulate ? ci[j + 3] : 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double x = ai[p];
        s0 += x * b0[p];
        s1 += x * b1[p];
        s2 += x * b2[p];
        s3 += x * b3[p];
      }
      ci[j] = s0;
      ci[j + 1] = s1;
      ci[j + 2] = s2;
      ci[j + 3] = s3;
    }
    for (; j < j1; ++j) {
      const double* bj = b + j * k;
      double s = accumulate ? ci[j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
}

// Rows [i0, i1) of C = Aᵀ·B.
inline void tn_rows(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c,
                    bool accumulate, std::size_t i0, std::size_t i1) {
  if (!accumulate) std::fill(c + i0 * n, c + i1 * n, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = i0; i < i1; ++i) {
      const double api = ap[i];
      double* ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

}  // namespace

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  if (!go_parallel(m, n, k)) {
    nn_columns(m, n, k, a.data(), b.data(), c.data(), accumulate, 0, n);
    return;
  }
  const auto blocks = static_cast<std::ptrdiff_t>((n + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for num_threads(g_threads) schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t j0 = static_cast<std::size_t>(blk) * kColumnBlock;
    nn_columns(m, n, k, a.data(), b.data(), c.data(), accumulate, j0,
               std::min(n, j0 + kColumnBlock));
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  if (!go_parallel(m, n, k)) {
    nt_columns(m, n, k, a.data(), b.data(), c.data(), accumulate, 0, n);
    return;
  }
  const auto blocks = static_cast<std::ptrdiff_t>((n + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for num_threads(g_threads) schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t j0 = static_cast<std::size_t>(blk) * kColumnBlock;
    nt_columns(m, n, k, a.data(), b.data(), c.data(), accumulate, j0,
               std::min(n, j0 + kColumnBlock));
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  if (!go_parallel(m, n, k)) {
    tn_rows(m, n, k, a.data(), b.data(), c.data(), accumulate, 0, m);
    return;
  }
  const auto blocks = static_cast<std::ptrdiff_t>((m + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for num_threads(g_threads) schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t i0 = static_cast<std::size_t>(blk) * kColumnBlock;
    tn_rows(m, n, k, a.data(), b.data(), c.data(), accumulate, i0,
            std::min(m, i0 + kColumnBlock));
  }
}

namespace serial {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      c[i * n + j] = s;
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
      c[i * n + j] = s;
    }
  }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate) {
  check_sizes(m, n, k, a.size(), b.size(), c.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[p * m + i] * b[p * n + j];
      c[i * n + j] = s;
    }
  }
}

}  // namespace serial

int thread_count() { return g_threads; }

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int configure_threads_from_env() {
  const char* env = std::getenv("ATTN_NMT_THREADS");
  if (env == nullptr || *env == '\0') {
    set_thread_count(1);
    return 1;
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw UsageError(std::string("ATTN_NMT_THREADS must be a positive integer, got '") +
                     env + "'");
  }
  set_thread_count(static_cast<int>(v));
  return g_threads;
}

}  // namespace nmt::kernels
