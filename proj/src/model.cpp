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

#include "nmt/model.hpp"

#include <cmath>
#include <string>

#include "nmt/error.hpp"
#include "nmt/kernels.hpp"
#include "nmt/ops.hpp"
#include "nmt/random.hpp"

namespace nmt {

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ContractError(std::string("model config: ") + name + " must be positive");
  };
  positive(src_vocab_size, "src_vocab_size");
  positive(tgt_vocab_size, "tgt_vocab_size");
  positive(embed_dim, "embed_dim");
  positive(hidden, "hidden");
  positive(layers, "layers");
  positive(max_decode_len, "max_decode_len");
  if (attention != AttentionMode::kDot && attention != AttentionMode::kUniform) {
    throw ContractError("model config: unknown attention mode");
  }
}

namespace {

std::vector<LstmCellParams> make_stack(const std::string& prefix, std::size_t first_input,
                                       const ModelConfig& c) {
  std::vector<LstmCellParams> layers;
  for (std::size_t k = 0; k < c.layers; ++k) {
    layers.emplace_back(prefix + "." + std::to_string(k), k == 0 ? first_input : c.hidden,
                        c.hidden);
  }
  return layers;
}

const ModelConfig& validated(const ModelConfig& c) {
  c.validate();
  return c;
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config)
    : src_embedding("src_embedding",
                    Tensor({validated(config).src_vocab_size, config.embed_dim})),
      tgt_embedding("tgt_embedding", Tensor({config.tgt_vocab_size, config.embed_dim})),
      encoder(make_stack("encoder", config.embed_dim, config)),
      decoder(make_stack("decoder", config.embed_dim + config.hidden, config)),
      W_c("attention.W_c", Tensor({config.hidden, 2 * config.hidden})),
      W_out("output.W", Tensor({config.tgt_vocab_size, config.hidden})),
      b_out("output.b", Tensor({config.tgt_vocab_size})) {}

std::vector<Parameter*> ModelParams::parameters() {
  std::vector<Parameter*> out{&src_embedding, &tgt_embedding};
  for (auto& l : encoder) out.insert(out.end(), {&l.W, &l.U, &l.b});
  for (auto& l : decoder) out.insert(out.end(), {&l.W, &l.U, &l.b});
  out.insert(out.end(), {&W_c, &W_out, &b_out});
  return out;
}

std::vector<const Parameter*> ModelParams::parameters() const {
  auto mut = const_cast<ModelParams*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

void ModelParams::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (Parameter* p : parameters()) {
    if (p->value.rank() == 1) {
      p->value.fill(0.0);
    } else {
      for (double& v : p->value.values()) v = rng.uniform(-0.08, 0.08);
    }
  }
  for (auto* stack : {&encoder, &decoder}) {
    for (auto& l : *stack) {
      const std::size_t h = l.hidden();
      for (std::size_t j = h; j < 2 * h; ++j) l.b.value[j] = 1.0;
    }
  }
}

void ModelParams::zero_grads() {
  for (Parameter* p : parameters()) p->zero_grad();
}

void ModelParams::shape_audit(const ModelConfig& config) const {
  ModelParams expected(config);
  const auto want = expected.parameters();
  const auto have = parameters();
  if (want.size() != have.size()) {
    throw SchemaError("model has " + std::to_string(have.size()) + " tensors, config implies " +
                      std::to_string(want.size()));
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i]->name != have[i]->name || want[i]->value.shape() != have[i]->value.shape() ||
        have[i]->grad.shape() != have[i]->value.shape()) {
      throw SchemaError("tensor " + have[i]->name + " " +
                        shape_string(have[i]->value.shape()) + " disagrees with config (" +
                        want[i]->name + " " + shape_string(want[i]->value.shape()) + ")");
    }
  }
}

Model::Model(const ModelConfig& c) : config(c), params(c) {}

Model Model::initialized(const ModelConfig& c, std::uint64_t seed) {
  Model m(c);
  m.params.initialize(seed);
  return m;
}

namespace {

void gather_rows(const Tensor& table, std::span<const TokenId> ids, Tensor& out,
                 std::size_t col_offset, const char* what) {
  const std::size_t dim = table.dim(1);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= table.dim(0)) {
      throw IndexError(std::string(what) + ": token id " + std::to_string(ids[r]) +
                       " out of range for vocabulary of size " + std::to_string(table.dim(0)));
    }
    const auto src = table.row(ids[r]);
    std::copy(src.begin(), src.end(), out.data() + r * out.dim(1) + col_offset);
    (void)dim;
  }
}

void scatter_add_rows(Tensor& table, std::span<const TokenId> ids, const Tensor& grad,
                      std::size_t col_offset) {
  const std::size_t dim = table.dim(1);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    double* dst = table.data() + ids[r] * dim;
    const double* g = grad.data() + r * grad.dim(1) + col_offset;
    for (std::size_t j = 0; j < dim; ++j) dst[j] += g[j];
  }
}

struct EncoderTrace {
  StackTrace stack;
  std::vector<std::vector<TokenId>> ids;  // per timestep, one per source
  EncoderOutput out;
};

// sources × len ids (PAD-filled) with per-row true lengths.
EncoderTrace run_encoder(const Model& model, std::span<const TokenId> ids, std::size_t sources,
                         std::size_t len, std::span<const std::size_t> lengths) {
  const ModelConfig& c = model.config;
  std::vector<Tensor> inputs;
  std::vector<Mask> active;
  std::vector<std::vector<TokenId>> step_ids;
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<TokenId> col(sources);
    Mask m(sources);
    for (std::size_t r = 0; r < sources; ++r) {
      col[r] = ids[r * len + t];
      m[r] = t < lengths[r] ? 1 : 0;
    }
    Tensor x({sources, c.embed_dim});
    gather_rows(model.params.src_embedding.value, col, x, 0, "encode");
    inputs.push_back(std::move(x));
    active.push_back(std::move(m));
    step_ids.push_back(std::move(col));
  }
  std::vector<LstmState> init(c.layers, LstmState::zeros(sources, c.hidden));
  StackTrace stack = stack_layers(model.params.encoder, inputs, init, active);

  EncoderOutput out{Tensor({sources, len, c.hidden}), Mask(sources * len), stack.finals()};
  for (std::size_t t = 0; t < len; ++t) {
    const Tensor& h = stack.output(t);
    for (std::size_t r = 0; r < sources; ++r) {
      std::copy_n(h.data() + r * c.hidden, c.hidden, out.states.data() + (r * len + t) * c.hidden);
      out.mask[r * len + t] = active[t][r];
    }
  }
  return {std::move(stack), std::move(step_ids), std::move(out)};
}

struct DecoderStepTrace {
  std::vector<TokenId> tokens;
  std::vector<LstmStepCache> layers;
  AttentionCache attention;
};

DecoderStepTrace run_decoder_step(const Model& model, std::span<const TokenId> tokens,
                                  const std::vector<LstmState>& prev_layers,
                                  const Tensor& prev_attentional, const EncoderOutput& enc,
                                  std::span<const std::size_t> enc_rows) {
  const ModelConfig& c = model.config;
  const std::size_t rows = tokens.size();
  if (prev_layers.size() != c.layers || prev_attentional.shape() != Shape{rows, c.hidden}) {
    throw DimensionError("decode_step: decoder state does not match " + std::to_string(rows) +
                         " rows of hidden size " + std::to_string(c.hidden));
  }
  Tensor input({rows, c.embed_dim + c.hidden});
  gather_rows(model.params.tgt_embedding.value, tokens, input, 0, "decode_step");
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(prev_attentional.data() + r * c.hidden, c.hidden,
                input.data() + r * input.dim(1) + c.embed_dim);
  }
  DecoderStepTrace trace{{tokens.begin(), tokens.end()}, {}, {Tensor({1}), Tensor({1}), Tensor({1})}};
  trace.layers.reserve(c.layers);
  trace.layers.push_back(lstm_step(model.params.decoder[0], input, prev_layers[0]));
  for (std::size_t k = 1; k < c.layers; ++k) {
    trace.layers.push_back(
        lstm_step(model.params.decoder[k], trace.layers[k - 1].next.h, prev_layers[k]));
  }
  trace.attention = attend(trace.layers.back().next.h, {enc.states, enc.mask}, enc_rows,
                           model.params.W_c, c.attention);
  return trace;
}

Tensor output_logits(const Model& model, const Tensor& attentional) {
  const std::size_t rows = attentional.dim(0), v = model.config.tgt_vocab_size;
  Tensor logits({rows, v});
  kernels::gemm_nt(rows, v, model.config.hidden, attentional.values(),
                   model.params.W_out.value.values(), logits.values(), false);
  for (std::size_t r = 0; r < rows; ++r) {
    double* l = logits.data() + r * v;
    for (std::size_t j = 0; j < v; ++j) l[j] += model.params.b_out.value[j];
  }
  return logits;
}

std::vector<std::size_t> identity_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

LossResult run_teacher_forced(const Model& model, Model* grads_into, const Batch& batch) {
  const ModelConfig& c = model.config;
  const std::size_t B = batch.rows, S = batch.max_source_len, T = batch.max_target_len;
  const std::size_t V = c.tgt_vocab_size, H = c.hidden, E = c.embed_dim;
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t t = 0; t < batch.target_lengths[r]; ++t) {
      if (batch.target(r, t) >= V) {
        throw IndexError("target token id " + std::to_string(batch.target(r, t)) +
                         " out of range for vocabulary of size " + std::to_string(V));
      }
    }
  }

  EncoderTrace enc = run_encoder(model, batch.source_ids, B, S, batch.source_lengths);
  const auto rows = identity_rows(B);

  LossResult result;
  result.token_count = batch.prediction_count();
  if (result.token_count == 0) throw ContractError("forward_loss: batch has no target tokens");
  const double scale = 1.0 / static_cast<double>(result.token_count);

  std::vector<DecoderStepTrace> steps;
  std::vector<Tensor> d_attn_from_output;  // per step, [B × H]
  std::vector<LstmState> state = enc.out.finals;
  Tensor attentional({B, H});
  std::vector<TokenId> tokens(B);
  std::vector<double> probs(V);

  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t r = 0; r < B; ++r) tokens[r] = batch.target(r, t);
    DecoderStepTrace step = run_decoder_step(model, tokens, state, attentional, enc.out, rows);
    Tensor logits = output_logits(model, step.attention.attentional);

    Tensor d_logits({B, V});
    bool any = false;
    for (std::size_t r = 0; r < B; ++r) {
      if (t + 1 >= batch.target_lengths[r]) continue;
      const TokenId gold = batch.target(r, t + 1);
      const auto row = logits.row(r);
      const double lse = log_sum_exp(row);
      result.total_nll += lse - row[gold];
      if (grads_into) {
        double* d = d_logits.data() + r * V;
        for (std::size_t j = 0; j < V; ++j) d[j] = std::exp(row[j] - lse) * scale;
        d[gold] -= scale;
        any = true;
      }
    }

    state.clear();
    for (const auto& l : step.layers) state.push_back(l.next);
    attentional = step.attention.attentional;

    if (grads_into) {
      ModelParams& g = grads_into->params;
      Tensor d_attn({B, H});
      if (any) {
        kernels::gemm_tn(V, H, B, d_logits.values(), step.attention.attentional.values(),
                         g.W_out.grad.values(), true);
        for (std::size_t r = 0; r < B; ++r) {
          for (std::size_t j = 0; j < V; ++j) g.b_out.grad[j] += d_logits.at(r, j);
        }
        kernels::gemm_nn(B, H, V, d_logits.values(), model.params.W_out.value.values(),
                         d_attn.values(), false);
      }
      d_attn_from_output.push_back(std::move(d_attn));
      steps.push_back(std::move(step));
    }
  }
  result.mean_loss = result.total_nll * scale;
  if (!grads_into) return result;

  // Decoder BPTT.
  ModelParams& g = grads_into->params;
  Tensor d_states(enc.out.states.shape());
  std::vector<LstmState> carry(c.layers, LstmState::zeros(B, H));
  Tensor d_feed({B, H});
  for (std::size_t t = steps.size(); t-- > 0;) {
    const DecoderStepTrace& step = steps[t];
    Tensor d_attn = d_attn_from_output[t];
    for (std::size_t i = 0; i < d_attn.size(); ++i) d_attn[i] += d_feed[i];

    const Tensor& top_h = step.layers.back().next.h;
    Tensor d_h = attend_backward(step.attention, top_h, {enc.out.states, enc.out.mask}, rows,
                                 g.W_c, c.attention, d_attn, d_states);
    for (std::size_t k = c.layers; k-- > 0;) {
      for (std::size_t i = 0; i < d_h.size(); ++i) d_h[i] += carry[k].h[i];
      LstmStepGrads sg = lstm_step_backward(g.decoder[k], step.layers[k], d_h, carry[k].c);
      carry[k] = {std::move(sg.dh_prev), std::move(sg.dc_prev)};
      d_h = std::move(sg.dx);
    }
    // d_h is now the gradient of [embedding; previous attentional].
    scatter_add_rows(g.tgt_embedding.grad, step.tokens, d_h, 0);
    for (std::size_t r = 0; r < B; ++r) {
      std::copy_n(d_h.data() + r * (E + H) + E, H, d_feed.data() + r * H);
    }
  }

  // Encoder BPTT: top-layer outputs receive the attention gradient, finals
  // receive the decoder's initial-state gradient.
  std::vector<Tensor> d_top;
  d_top.reserve(S);
  for (std::size_t t = 0; t < S; ++t) {
    Tensor d({B, H});
    for (std::size_t r = 0; r < B; ++r) {
      std::copy_n(d_states.data() + (r * S + t) * H, H, d.data() + r * H);
    }
    d_top.push_back(std::move(d));
  }
  StackGrads eg = stack_backward(g.encoder, enc.stack, d_top, carry);
  for (std::size_t t = 0; t < S; ++t) {
    scatter_add_rows(g.src_embedding.grad, enc.ids[t], eg.dx[t], 0);
  }
  return result;
}

}  // namespace

EncoderOutput encode(const Model& model, std::span<const TokenId> source_ids) {
  if (source_ids.empty()) throw DimensionError("encode: empty source sequence");
  const std::size_t len = source_ids.size();
  return run_encoder(model, source_ids, 1, len, std::span(&len, 1)).out;
}

DecoderState initial_decoder_state(const EncoderOutput& enc) {
  const std::size_t rows = enc.sources();
  return {enc.finals, Tensor({rows, enc.states.dim(2)})};
}

DecodeStepOutput decode_step(const Model& model, std::span<const TokenId> prev_tokens,
                             const DecoderState& prev, const EncoderOutput& enc,
                             std::span<const std::size_t> enc_rows) {
  if (enc_rows.size() != prev_tokens.size()) {
    throw DimensionError("decode_step: one encoder row per token required");
  }
  DecoderStepTrace step =
      run_decoder_step(model, prev_tokens, prev.layers, prev.attentional, enc, enc_rows);
  std::vector<LstmState> layers;
  layers.reserve(step.layers.size());
  for (auto& l : step.layers) layers.push_back(std::move(l.next));
  Tensor logits = output_logits(model, step.attention.attentional);
  return {std::move(logits), DecoderState{std::move(layers), std::move(step.attention.attentional)},
          std::move(step.attention.weights)};
}

LossResult forward_loss(const Model& model, const Batch& batch) {
  return run_teacher_forced(model, nullptr, batch);
}

LossResult forward_backward(Model& model, const Batch& batch) {
  return run_teacher_forced(model, &model, batch);
}

}  // namespace nmt
