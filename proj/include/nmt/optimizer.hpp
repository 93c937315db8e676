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
#include <cstdint>
#include <span>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt {

enum class OptimizerKind : std::uint32_t { kSgd = 0, kAdam = 1 };

const char* to_string(OptimizerKind kind);

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  std::uint64_t step = 0;
  std::vector<Tensor> first_moment;   // adam only, mirrors the parameters
  std::vector<Tensor> second_moment;

  static OptimizerState create(OptimizerKind kind, std::span<Parameter* const> params);
};

double global_grad_norm(std::span<Parameter* const> params);

/// If the global L2 norm g exceeds clip_norm, scales every gradient by
/// clip_norm / g. Returns the factor applied (1.0 when untouched).
double clip_gradients(std::span<Parameter* const> params, double clip_norm);

/// sgd: p ← p − lr·grad. adam: bias-corrected moment update. Gradients are
/// zeroed afterwards.
void optimizer_step(std::span<Parameter* const> params, OptimizerState& state, double lr);

}  // namespace nmt
