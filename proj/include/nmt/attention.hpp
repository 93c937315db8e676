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

#include "nmt/lstm.hpp"
#include "nmt/tensor.hpp"

// Global attention: the decoder's top hidden state is dot-scored against
// every unmasked encoder state, the scores are softmax-normalized, and the
// weighted sum of encoder states (the context) is combined with the hidden
// state as h̃ = tanh(W_c · [context; h]).

namespace nmt {

enum class AttentionMode : std::uint32_t {
  kDot = 0,
  kUniform = 1,  // ablation: equal weight on every unmasked position
};

const char* to_string(AttentionMode mode);

/// weights[t] = softmax_t(decoder_h · encoder_states[t]) over positions with
/// mask[t] != 0; masked positions get exactly 0. Throws ContractError when
/// every position is masked.
Tensor attention_scores(const Tensor& decoder_h, const Tensor& encoder_states,
                        std::span<const std::uint8_t> mask,
                        AttentionMode mode = AttentionMode::kDot);

/// Σ_t weights[t] · encoder_states[t]
Tensor context_vector(const Tensor& weights, const Tensor& encoder_states);

/// tanh(W_c · concat(context, decoder_h)); W_c is [h × 2h].
Tensor attentional_hidden(const Tensor& decoder_h, const Tensor& context, const Tensor& W_c);

/// Encoder states for a group of sources: states [sources × len × h] and
/// mask [sources × len].
struct AttentionMemory {
  const Tensor& states;
  const Mask& mask;
};

struct AttentionCache {
  Tensor weights;      // [rows × len]
  Tensor combined;     // [rows × 2h], context then query
  Tensor attentional;  // [rows × h]
};

/// Row r of `query` attends over memory source `memory_rows[r]`.
AttentionCache attend(const Tensor& query, AttentionMemory memory,
                      std::span<const std::size_t> memory_rows, const Parameter& W_c,
                      AttentionMode mode);

/// Accumulates W_c's gradient and d(memory states) into `d_states`; returns
/// the gradient with respect to `query`.
Tensor attend_backward(const AttentionCache& cache, const Tensor& query, AttentionMemory memory,
                       std::span<const std::size_t> memory_rows, Parameter& W_c,
                       AttentionMode mode, const Tensor& d_attentional, Tensor& d_states);

}  // namespace nmt
