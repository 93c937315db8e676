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

#include "nmt/attention.hpp"
#include "nmt/corpus.hpp"
#include "nmt/lstm.hpp"
#include "nmt/tensor.hpp"
#include "nmt/vocab.hpp"

namespace nmt {

struct ModelConfig {
  std::size_t src_vocab_size = 0;
  std::size_t tgt_vocab_size = 0;
  std::size_t embed_dim = 128;
  std::size_t hidden = 128;
  std::size_t layers = 2;
  std::size_t max_decode_len = 50;
  AttentionMode attention = AttentionMode::kDot;

  /// Throws ContractError on a non-positive field.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Every trainable tensor of the translation model. The decoder's first
/// layer reads [target embedding; previous attentional state].
class ModelParams {
 public:
  explicit ModelParams(const ModelConfig& config);

  Parameter src_embedding;  // [src_vocab × embed]
  Parameter tgt_embedding;  // [tgt_vocab × embed]
  std::vector<LstmCellParams> encoder;
  std::vector<LstmCellParams> decoder;
  Parameter W_c;    // [hidden × 2·hidden]
  Parameter W_out;  // [tgt_vocab × hidden]
  Parameter b_out;  // [tgt_vocab]

  /// Canonical order; checkpoints and the initializer rely on it.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Weights uniform in [−0.08, 0.08], biases 0 except the forget gate (1).
  void initialize(std::uint64_t seed);
  void zero_grads();
  /// Throws SchemaError naming the first tensor whose shape disagrees.
  void shape_audit(const ModelConfig& config) const;
};

struct Model {
  explicit Model(const ModelConfig& config);
  static Model initialized(const ModelConfig& config, std::uint64_t seed);

  ModelConfig config;
  ModelParams params;
};

struct EncoderOutput {
  Tensor states;                  // [sources × len × hidden], top layer
  Mask mask;                      // [sources × len]
  std::vector<LstmState> finals;  // per layer, [sources × hidden]

  std::size_t sources() const { return states.dim(0); }
  std::size_t length() const { return states.dim(1); }
};

EncoderOutput encode(const Model& model, std::span<const TokenId> source_ids);

struct DecoderState {
  std::vector<LstmState> layers;  // [rows × hidden] each
  Tensor attentional;             // [rows × hidden]
};

/// Layer-wise copy of the encoder finals and a zero attentional vector.
DecoderState initial_decoder_state(const EncoderOutput& enc);

struct DecodeStepOutput {
  Tensor logits;   // [rows × tgt_vocab]
  DecoderState state;
  Tensor weights;  // [rows × src_len]
};

/// One decoder step for `prev_tokens.size()` rows; row r attends over
/// encoder source `enc_rows[r]`.
DecodeStepOutput decode_step(const Model& model, std::span<const TokenId> prev_tokens,
                             const DecoderState& prev, const EncoderOutput& enc,
                             std::span<const std::size_t> enc_rows);

struct LossResult {
  double mean_loss = 0.0;  // total_nll / token_count
  double total_nll = 0.0;
  std::size_t token_count = 0;
};

/// Teacher-forced negative log-likelihood of every non-PAD target position.
LossResult forward_loss(const Model& model, const Batch& batch);

/// forward_loss plus accumulation of d(mean_loss)/d(param) into the grads.
LossResult forward_backward(Model& model, const Batch& batch);

}  // namespace nmt
