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
#include <string>
#include <vector>

#include "nmt/tensor.hpp"

// LSTM cells over row batches. A state or input with `rows` rows advances
// `rows` independent sequences in lockstep; a row whose `active` flag is 0
// carries its state through the step unchanged (used for padding).
//
// Gate rows of W, U and b are packed in the order input, forget, cell
// candidate, output:
//   i = σ(W_i x + U_i h + b_i)    f = σ(W_f x + U_f h + b_f)
//   g = tanh(W_g x + U_g h + b_g) o = σ(W_o x + U_o h + b_o)
//   c' = f ⊙ c + i ⊙ g            h' = o ⊙ tanh(c')

namespace nmt {

using Mask = std::vector<std::uint8_t>;

struct LstmCellParams {
  LstmCellParams(const std::string& prefix, std::size_t input_dim, std::size_t hidden);

  Parameter W;  // [4h × input_dim]
  Parameter U;  // [4h × h]
  Parameter b;  // [4h]

  std::size_t hidden() const { return U.value.dim(1); }
  std::size_t input_dim() const { return W.value.dim(1); }
  std::vector<Parameter*> parameters() { return {&W, &U, &b}; }
  /// Throws SchemaError if the three shapes disagree.
  void validate() const;
};

struct LstmState {
  Tensor h;  // [rows × hidden]
  Tensor c;  // [rows × hidden]

  static LstmState zeros(std::size_t rows, std::size_t hidden);
};

struct LstmStepCache {
  Tensor x;
  LstmState prev;
  Tensor gates;  // [rows × 4h], activated
  Tensor tanh_c;
  LstmState next;
  Mask active;  // empty means every row is active
};

LstmStepCache lstm_step(const LstmCellParams& params, const Tensor& x,
                        const LstmState& prev, std::span<const std::uint8_t> active = {});

struct LstmStepGrads {
  Tensor dx;
  Tensor dh_prev;
  Tensor dc_prev;
};

/// Accumulates into params' gradients and returns input/state gradients.
LstmStepGrads lstm_step_backward(LstmCellParams& params, const LstmStepCache& cache,
                                 const Tensor& dh, const Tensor& dc);

/// Single-sequence convenience: x is [x_dim], state tensors are [h].
LstmState lstm_cell(const Tensor& x, const LstmState& state, const LstmCellParams& params);

struct LstmLayerTrace {
  std::vector<LstmStepCache> steps;
  const LstmState& final_state() const { return steps.back().next; }
};

/// Runs the cell left to right over `inputs` (each [rows × x_dim]).
/// `active`, when non-empty, holds one row mask per timestep.
LstmLayerTrace lstm_layer(const LstmCellParams& params, std::span<const Tensor> inputs,
                          const LstmState& init, std::span<const Mask> active = {});

struct LstmSequenceGrads {
  std::vector<Tensor> dx;  // per timestep
  LstmState d_init;
};

/// Backpropagation through time. `d_outputs[t]` is the loss gradient with
/// respect to the step-t hidden output (empty span → none); `d_final` is
/// the gradient with respect to the last state.
LstmSequenceGrads lstm_layer_backward(LstmCellParams& params, const LstmLayerTrace& trace,
                                      std::span<const Tensor> d_outputs,
                                      const LstmState& d_final);

struct StackTrace {
  std::vector<LstmLayerTrace> layers;

  std::size_t length() const { return layers.front().steps.size(); }
  /// Top-layer hidden output at step t.
  const Tensor& output(std::size_t t) const { return layers.back().steps[t].next.h; }
  std::vector<LstmState> finals() const;
};

/// Layer k consumes layer k−1's hidden sequence.
StackTrace stack_layers(std::span<const LstmCellParams> layers, std::span<const Tensor> inputs,
                        std::span<const LstmState> init_states,
                        std::span<const Mask> active = {});

struct StackGrads {
  std::vector<Tensor> dx;           // gradient of the bottom-layer inputs
  std::vector<LstmState> d_init;    // per layer
};

StackGrads stack_backward(std::span<LstmCellParams> layers, const StackTrace& trace,
                          std::span<const Tensor> d_top_outputs,
                          std::span<const LstmState> d_finals);

}  // namespace nmt
