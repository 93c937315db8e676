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

#include "nmt/decoder.hpp"

#include <fmt/format.h>

#include <ostream>

#include "nmt/error.hpp"
#include "nmt/ops.hpp"
#include "nmt/tokenizer.hpp"

namespace nmt {

ModelStepper::ModelStepper(const Model& model, std::span<const TokenId> source_ids)
    : model_(model), enc_(encode(model, source_ids)) {}

SearchStep<DecoderState> ModelStepper::start() const {
  return advance(initial_decoder_state(enc_), kBosId);
}

SearchStep<DecoderState> ModelStepper::advance(const DecoderState& state, TokenId token) const {
  const std::size_t row = 0;
  DecodeStepOutput out = decode_step(model_, std::span(&token, 1), state, enc_, std::span(&row, 1));
  const auto w = out.weights.row(0);
  return {std::move(out.state), log_softmax(out.logits.row(0)), {w.begin(), w.end()}};
}

DecodeConfig default_decode_config(const Model& model) {
  DecodeConfig c;
  c.max_decode_len = model.config.max_decode_len;
  return c;
}

SearchResult greedy_decode(const Model& model, std::span<const TokenId> source_ids,
                           const DecodeConfig& config) {
  return greedy_decode(ModelStepper(model, source_ids), config);
}

std::vector<SearchResult> beam_search(const Model& model, std::span<const TokenId> source_ids,
                                      const DecodeConfig& config) {
  return beam_search(ModelStepper(model, source_ids), config);
}

Translation translate(std::string_view text, const Vocabulary& source_vocab,
                      const Vocabulary& target_vocab, const Model& model,
                      const DecodeConfig& config) {
  Translation t;
  t.source_tokens = tokenize(text);
  if (t.source_tokens.empty()) throw EmptyInputError("translate: input has no tokens");
  const auto ids = source_vocab.encode(t.source_tokens);
  auto results = beam_search(model, ids, config);
  if (results.empty()) throw ContractError("translate: beam search produced no hypothesis");
  SearchResult& best = results.front();
  t.ids = best.tokens;
  t.score = best.score;
  t.attention = std::move(best.attention);
  std::span<const TokenId> body(best.tokens);
  if (!body.empty() && body.back() == config.eos) body = body.first(body.size() - 1);
  t.tokens = target_vocab.decode(body);
  t.text = detokenize(t.tokens);
  return t;
}

void write_attention(std::ostream& out, const Translation& t, const Vocabulary& target_vocab) {
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    std::string line = target_vocab.token(t.ids[i]);
    line += '\t';
    const auto& row = t.attention[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) line += ',';
      line += fmt::format("{:.6f}", row[j]);
    }
    out << line << '\n';
  }
}

}  // namespace nmt
