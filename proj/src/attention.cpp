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

#include "nmt/attention.hpp"

#include <cmath>
#include <limits>

#include "nmt/error.hpp"
#include "nmt/kernels.hpp"

namespace nmt {

const char* to_string(AttentionMode mode) {
  return mode == AttentionMode::kUniform ? "uniform" : "dot";
}

namespace {

// weights over `len` positions of `keys` ([len × h]) for one query.
void row_weights(std::span<const double> query, const double* keys, std::size_t len,
                 const std::uint8_t* mask, AttentionMode mode, double* weights) {
  const std::size_t h = query.size();
  std::size_t live = 0;
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < len; ++t) {
    if (!mask[t]) continue;
    ++live;
    double s = 0.0;
    if (mode == AttentionMode::kDot) {
      const double* k = keys + t * h;
      for (std::size_t j = 0; j < h; ++j) s += query[j] * k[j];
    }
    weights[t] = s;
    if (s > mx) mx = s;
  }
  if (live == 0) throw ContractError("attention: every encoder position is masked");
  double z = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    if (!mask[t]) continue;
    weights[t] = std::exp(weights[t] - mx);
    z += weights[t];
  }
  for (std::size_t t = 0; t < len; ++t) weights[t] = mask[t] ? weights[t] / z : 0.0;
}

void row_context(const double* weights, const double* keys, std::size_t len, std::size_t h,
                 double* out) {
  for (std::size_t j = 0; j < h; ++j) out[j] = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    const double w = weights[t];
    if (w == 0.0) continue;
    const double* k = keys + t * h;
    for (std::size_t j = 0; j < h; ++j) out[j] += w * k[j];
  }
}

void check_memory(const AttentionMemory& m, std::size_t h) {
  const Tensor& s = m.states;
  if (s.rank() != 3 || s.dim(2) != h) {
    throw DimensionError("attention: memory " + shape_string(s.shape()) +
                         " does not match hidden size " + std::to_string(h));
  }
  if (m.mask.size() != s.dim(0) * s.dim(1)) {
    throw DimensionError("attention: memory mask size disagrees with states");
  }
}

}  // namespace

Tensor attention_scores(const Tensor& decoder_h, const Tensor& encoder_states,
                        std::span<const std::uint8_t> mask, AttentionMode mode) {
  if (encoder_states.rank() != 2 || decoder_h.rank() != 1 ||
      encoder_states.dim(1) != decoder_h.dim(0)) {
    throw DimensionError("attention_scores: query " + shape_string(decoder_h.shape()) +
                         " vs encoder states " + shape_string(encoder_states.shape()));
  }
  const std::size_t len = encoder_states.dim(0);
  if (mask.size() != len) throw DimensionError("attention_scores: mask length mismatch");
  Tensor w({len});
  row_weights(decoder_h.values(), encoder_states.data(), len, mask.data(), mode, w.data());
  return w;
}

Tensor context_vector(const Tensor& weights, const Tensor& encoder_states) {
  if (weights.rank() != 1 || encoder_states.rank() != 2 ||
      weights.dim(0) != encoder_states.dim(0)) {
    throw DimensionError("context_vector: weights " + shape_string(weights.shape()) +
                         " vs encoder states " + shape_string(encoder_states.shape()));
  }
  const std::size_t h = encoder_states.dim(1);
  Tensor ctx({h});
  row_context(weights.data(), encoder_states.data(), weights.size(), h, ctx.data());
  return ctx;
}

Tensor attentional_hidden(const Tensor& decoder_h, const Tensor& context, const Tensor& W_c) {
  const std::size_t h = decoder_h.size();
  if (context.size() != h || W_c.rank() != 2 || W_c.dim(0) != h || W_c.dim(1) != 2 * h) {
    throw DimensionError("attentional_hidden: h " + shape_string(decoder_h.shape()) +
                         ", context " + shape_string(context.shape()) + ", W_c " +
                         shape_string(W_c.shape()));
  }
  std::vector<double> cat(context.values().begin(), context.values().end());
  cat.insert(cat.end(), decoder_h.values().begin(), decoder_h.values().end());
  Tensor out({h});
  kernels::gemm_nt(1, h, 2 * h, cat, W_c.values(), out.values(), false);
  for (double& v : out.values()) v = std::tanh(v);
  return out;
}

AttentionCache attend(const Tensor& query, AttentionMemory memory,
                      std::span<const std::size_t> memory_rows, const Parameter& W_c,
                      AttentionMode mode) {
  const std::size_t rows = query.dim(0), h = query.dim(1);
  check_memory(memory, h);
  if (memory_rows.size() != rows) throw DimensionError("attend: one memory row per query row");
  const std::size_t len = memory.states.dim(1);

  AttentionCache c{Tensor({rows, len}), Tensor({rows, 2 * h}), Tensor({rows, h})};
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t m = memory_rows[r];
    if (m >= memory.states.dim(0)) throw IndexError("attend: memory row out of range");
    const double* keys = memory.states.data() + m * len * h;
    double* w = c.weights.data() + r * len;
    row_weights(query.row(r), keys, len, memory.mask.data() + m * len, mode, w);
    double* cat = c.combined.data() + r * 2 * h;
    row_context(w, keys, len, h, cat);
    for (std::size_t j = 0; j < h; ++j) cat[h + j] = query.at(r, j);
  }
  kernels::gemm_nt(rows, h, 2 * h, c.combined.values(), W_c.value.values(),
                   c.attentional.values(), false);
  for (double& v : c.attentional.values()) v = std::tanh(v);
  return c;
}

Tensor attend_backward(const AttentionCache& c, const Tensor& query, AttentionMemory memory,
                       std::span<const std::size_t> memory_rows, Parameter& W_c,
                       AttentionMode mode, const Tensor& d_attentional, Tensor& d_states) {
  const std::size_t rows = query.dim(0), h = query.dim(1);
  const std::size_t len = memory.states.dim(1);
  require_same_shape(d_attentional, c.attentional, "attend_backward");
  require_same_shape(d_states, memory.states, "attend_backward d_states");

  Tensor d_pre({rows, h});
  for (std::size_t i = 0; i < d_pre.size(); ++i) {
    const double a = c.attentional[i];
    d_pre[i] = d_attentional[i] * (1.0 - a * a);
  }
  kernels::gemm_tn(h, 2 * h, rows, d_pre.values(), c.combined.values(), W_c.grad.values(), true);
  Tensor d_cat({rows, 2 * h});
  kernels::gemm_nn(rows, 2 * h, h, d_pre.values(), W_c.value.values(), d_cat.values(), false);

  Tensor d_query({rows, h});
  std::vector<double> dw(len);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t m = memory_rows[r];
    const double* keys = memory.states.data() + m * len * h;
    double* dkeys = d_states.data() + m * len * h;
    const double* w = c.weights.data() + r * len;
    const double* d_ctx = d_cat.data() + r * 2 * h;
    double* dq = d_query.data() + r * h;
    for (std::size_t j = 0; j < h; ++j) dq[j] = d_cat.at(r, h + j);

    // context = Σ w_t k_t
    double wdot = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const double wt = w[t];
      const double* k = keys + t * h;
      double* dk = dkeys + t * h;
      double s = 0.0;
      for (std::size_t j = 0; j < h; ++j) {
        s += d_ctx[j] * k[j];
        dk[j] += wt * d_ctx[j];
      }
      dw[t] = s;
      wdot += wt * s;
    }
    if (mode != AttentionMode::kDot) continue;
    // softmax Jacobian, then score_t = q · k_t
    for (std::size_t t = 0; t < len; ++t) {
      const double ds = w[t] * (dw[t] - wdot);
      if (ds == 0.0) continue;
      const double* k = keys + t * h;
      double* dk = dkeys + t * h;
      for (std::size_t j = 0; j < h; ++j) {
        dq[j] += ds * k[j];
        dk[j] += ds * query.at(r, j);
      }
    }
  }
  return d_query;
}

}  // namespace nmt
