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

#pragma once

#include <cstddef>
#include <span>

// Dense matrix kernels used by every layer of the model.
//
// Each kernel has an OpenMP version and a serial reference. Both compute
// every output element as the same left-to-right sum over the shared
// dimension, so their results are bitwise identical for any thread count.
// Work is split over output columns (nn, nt) or output rows (tn), never over
// the reduction.

namespace nmt::kernels {

/// C[m×n] (+)= A[m×k] · B[k×n]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);

/// C[m×n] (+)= A[m×k] · B[n×k]ᵀ
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);

/// C[m×n] (+)= A[k×m]ᵀ · B[k×n]
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);

namespace serial {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             std::span<const double> a, std::span<const double> b,
             std::span<double> c, bool accumulate);

}  // namespace serial

/// Worker count used by the parallel kernels (1 unless configured).
int thread_count();
void set_thread_count(int threads);

/// Reads ATTN_NMT_THREADS. Unset → 1. Invalid values throw UsageError.
int configure_threads_from_env();

}  // namespace nmt::kernels
