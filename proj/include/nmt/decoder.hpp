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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmt/beam_search.hpp"
#include "nmt/model.hpp"
#include "nmt/vocab.hpp"

namespace nmt {

/// Step model over a trained translation model for one source sentence.
class ModelStepper {
 public:
  using State = DecoderState;

  ModelStepper(const Model& model, std::span<const TokenId> source_ids);

  SearchStep<State> start() const;
  SearchStep<State> advance(const State& state, TokenId token) const;

  const EncoderOutput& encoder_output() const { return enc_; }

 private:
  const Model& model_;
  EncoderOutput enc_;
};

/// DecodeConfig with the model's length cap and defaults elsewhere.
DecodeConfig default_decode_config(const Model& model);

SearchResult greedy_decode(const Model& model, std::span<const TokenId> source_ids,
                           const DecodeConfig& config);
std::vector<SearchResult> beam_search(const Model& model, std::span<const TokenId> source_ids,
                                      const DecodeConfig& config);

struct Translation {
  std::vector<std::string> source_tokens;
  std::vector<std::string> tokens;  // EOS stripped
  std::string text;
  double score = 0.0;
  /// [emitted tokens (EOS included) × source length]
  std::vector<std::vector<double>> attention;
  std::vector<TokenId> ids;  // raw hypothesis, EOS included
};

/// tokenize → ids (UNK for OOV) → beam search → space-joined best
/// hypothesis. Throws EmptyInputError when the text has no tokens.
Translation translate(std::string_view text, const Vocabulary& source_vocab,
                      const Vocabulary& target_vocab, const Model& model,
                      const DecodeConfig& config);

/// One line per emitted target token: `token<TAB>w1,w2,...`, weights with
/// six decimals.
void write_attention(std::ostream& out, const Translation& t, const Vocabulary& target_vocab);

}  // namespace nmt
