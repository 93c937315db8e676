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

#include "nmt/lstm.hpp"

#include <cmath>

#include "nmt/error.hpp"
#include "nmt/kernels.hpp"
#include "nmt/ops.hpp"

namespace nmt {

LstmCellParams::LstmCellParams(const std::string& prefix, std::size_t input_dim,
                               std::size_t hidden)
    : W(prefix + ".W", Tensor({4 * hidden, input_dim})),
      U(prefix + ".U", Tensor({4 * hidden, hidden})),
      b(prefix + ".b", Tensor({4 * hidden})) {}

void LstmCellParams::validate() const {
  const std::size_t h = U.value.rank() == 2 ? U.value.dim(1) : 0;
  const bool ok = U.value.rank() == 2 && U.value.dim(0) == 4 * h && W.value.rank() == 2 &&
                  W.value.dim(0) == 4 * h && b.value.rank() == 1 && b.value.dim(0) == 4 * h;
  if (!ok) {
    throw SchemaError("LSTM parameter shapes disagree: W " + shape_string(W.value.shape()) +
                      ", U " + shape_string(U.value.shape()) + ", b " +
                      shape_string(b.value.shape()));
  }
}

LstmState LstmState::zeros(std::size_t rows, std::size_t hidden) {
  return {Tensor({rows, hidden}), Tensor({rows, hidden})};
}

namespace {

void check_step_shapes(const LstmCellParams& p, const Tensor& x, const LstmState& s) {
  const std::size_t h = p.hidden();
  if (x.rank() != 2 || x.dim(1) != p.input_dim()) {
    throw DimensionError("lstm: input " + shape_string(x.shape()) + " does not match W " +
                         shape_string(p.W.value.shape()));
  }
  const Shape want{x.dim(0), h};
  if (s.h.shape() != want || s.c.shape() != want) {
    throw DimensionError("lstm: state shapes " + shape_string(s.h.shape()) + "/" +
                         shape_string(s.c.shape()) + " do not match " + shape_string(want));
  }
}

bool is_active(std::span<const std::uint8_t> active, std::size_t r) {
  return active.empty() || active[r] != 0;
}

}  // namespace

LstmStepCache lstm_step(const LstmCellParams& p, const Tensor& x, const LstmState& prev,
                        std::span<const std::uint8_t> active) {
  check_step_shapes(p, x, prev);
  const std::size_t rows = x.dim(0), h = p.hidden(), in = p.input_dim();
  if (!active.empty() && active.size() != rows) {
    throw DimensionError("lstm: active mask has " + std::to_string(active.size()) +
                         " entries for " + std::to_string(rows) + " rows");
  }

  LstmStepCache c{x, prev, Tensor({rows, 4 * h}), Tensor({rows, h}),
                  LstmState::zeros(rows, h), Mask(active.begin(), active.end())};
  kernels::gemm_nt(rows, 4 * h, in, x.values(), p.W.value.values(), c.gates.values(), false);
  kernels::gemm_nt(rows, 4 * h, h, prev.h.values(), p.U.value.values(), c.gates.values(), true);

  for (std::size_t r = 0; r < rows; ++r) {
    double* z = c.gates.data() + r * 4 * h;
    for (std::size_t j = 0; j < 4 * h; ++j) z[j] += p.b.value[j];
    for (std::size_t j = 0; j < h; ++j) {
      z[j] = sigmoid(z[j]);
      z[h + j] = sigmoid(z[h + j]);
      z[2 * h + j] = std::tanh(z[2 * h + j]);
      z[3 * h + j] = sigmoid(z[3 * h + j]);
    }
    const double* cp = prev.c.data() + r * h;
    double* cn = c.next.c.data() + r * h;
    double* hn = c.next.h.data() + r * h;
    double* tc = c.tanh_c.data() + r * h;
    if (is_active(active, r)) {
      for (std::size_t j = 0; j < h; ++j) {
        cn[j] = z[h + j] * cp[j] + z[j] * z[2 * h + j];
        tc[j] = std::tanh(cn[j]);
        hn[j] = z[3 * h + j] * tc[j];
      }
    } else {
      const double* hp = prev.h.data() + r * h;
      for (std::size_t j = 0; j < h; ++j) {
        cn[j] = cp[j];
        hn[j] = hp[j];
      }
    }
  }
  return c;
}

LstmStepGrads lstm_step_backward(LstmCellParams& p, const LstmStepCache& c, const Tensor& dh,
                                 const Tensor& dc) {
  const std::size_t rows = c.x.dim(0), h = p.hidden(), in = p.input_dim();
  require_same_shape(dh, c.next.h, "lstm_step_backward dh");
  require_same_shape(dc, c.next.c, "lstm_step_backward dc");

  Tensor dz({rows, 4 * h});
  LstmStepGrads g{Tensor({rows, in}), Tensor({rows, h}), Tensor({rows, h})};
  for (std::size_t r = 0; r < rows; ++r) {
    if (!is_active(c.active, r)) continue;
    const double* z = c.gates.data() + r * 4 * h;
    const double* tc = c.tanh_c.data() + r * h;
    const double* cp = c.prev.c.data() + r * h;
    const double* dhr = dh.data() + r * h;
    const double* dcr = dc.data() + r * h;
    double* dzr = dz.data() + r * 4 * h;
    double* dcp = g.dc_prev.data() + r * h;
    for (std::size_t j = 0; j < h; ++j) {
      const double i = z[j], f = z[h + j], gg = z[2 * h + j], o = z[3 * h + j];
      const double dcell = dcr[j] + dhr[j] * o * (1.0 - tc[j] * tc[j]);
      dzr[j] = dcell * gg * i * (1.0 - i);
      dzr[h + j] = dcell * cp[j] * f * (1.0 - f);
      dzr[2 * h + j] = dcell * i * (1.0 - gg * gg);
      dzr[3 * h + j] = dhr[j] * tc[j] * o * (1.0 - o);
      dcp[j] = dcell * f;
    }
  }

  kernels::gemm_tn(4 * h, in, rows, dz.values(), c.x.values(), p.W.grad.values(), true);
  kernels::gemm_tn(4 * h, h, rows, dz.values(), c.prev.h.values(), p.U.grad.values(), true);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dzr = dz.data() + r * 4 * h;
    for (std::size_t j = 0; j < 4 * h; ++j) p.b.grad[j] += dzr[j];
  }
  kernels::gemm_nn(rows, in, 4 * h, dz.values(), p.W.value.values(), g.dx.values(), false);
  kernels::gemm_nn(rows, h, 4 * h, dz.values(), p.U.value.values(), g.dh_prev.values(), false);

  for (std::size_t r = 0; r < rows; ++r) {
    if (is_active(c.active, r)) continue;
    for (std::size_t j = 0; j < h; ++j) {
      g.dh_prev.at(r, j) = dh.at(r, j);
      g.dc_prev.at(r, j) = dc.at(r, j);
    }
  }
  return g;
}

LstmState lstm_cell(const Tensor& x, const LstmState& state, const LstmCellParams& params) {
  const std::size_t h = params.hidden();
  if (x.rank() != 1 || state.h.rank() != 1 || state.c.rank() != 1) {
    throw DimensionError("lstm_cell expects rank-1 input and state tensors");
  }
  const LstmState s{state.h.reshaped({1, state.h.size()}), state.c.reshaped({1, state.c.size()})};
  LstmStepCache c = lstm_step(params, x.reshaped({1, x.size()}), s);
  return {c.next.h.reshaped({h}), c.next.c.reshaped({h})};
}

LstmLayerTrace lstm_layer(const LstmCellParams& params, std::span<const Tensor> inputs,
                          const LstmState& init, std::span<const Mask> active) {
  if (inputs.empty()) throw DimensionError("lstm_layer: empty input sequence");
  if (!active.empty() && active.size() != inputs.size()) {
    throw DimensionError("lstm_layer: one active mask per timestep required");
  }
  LstmLayerTrace trace;
  trace.steps.reserve(inputs.size());
  const LstmState* state = &init;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    std::span<const std::uint8_t> mask;
    if (!active.empty()) mask = active[t];
    trace.steps.push_back(lstm_step(params, inputs[t], *state, mask));
    state = &trace.steps.back().next;
  }
  return trace;
}

LstmSequenceGrads lstm_layer_backward(LstmCellParams& params, const LstmLayerTrace& trace,
                                      std::span<const Tensor> d_outputs,
                                      const LstmState& d_final) {
  const std::size_t n = trace.steps.size();
  if (!d_outputs.empty() && d_outputs.size() != n) {
    throw DimensionError("lstm_layer_backward: one output gradient per timestep required");
  }
  LstmSequenceGrads out{std::vector<Tensor>(n, Tensor({1})), d_final};
  Tensor dh = d_final.h;
  Tensor dc = d_final.c;
  for (std::size_t t = n; t-- > 0;) {
    if (!d_outputs.empty()) {
      const Tensor& d = d_outputs[t];
      require_same_shape(d, dh, "lstm_layer_backward output gradient");
      for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += d[i];
    }
    LstmStepGrads g = lstm_step_backward(params, trace.steps[t], dh, dc);
    out.dx[t] = std::move(g.dx);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
  out.d_init = {std::move(dh), std::move(dc)};
  return out;
}

std::vector<LstmState> StackTrace::finals() const {
  std::vector<LstmState> f;
  f.reserve(layers.size());
  for (const auto& l : layers) f.push_back(l.final_state());
  return f;
}

StackTrace stack_layers(std::span<const LstmCellParams> layers, std::span<const Tensor> inputs,
                        std::span<const LstmState> init_states, std::span<const Mask> active) {
  if (layers.empty()) throw DimensionError("stack_layers: at least one layer required");
  if (init_states.size() != layers.size()) {
    throw DimensionError("stack_layers: " + std::to_string(init_states.size()) +
                         " initial states for " + std::to_string(layers.size()) + " layers");
  }
  for (std::size_t k = 1; k < layers.size(); ++k) {
    if (layers[k].input_dim() != layers[k - 1].hidden()) {
      throw DimensionError("stack_layers: layer " + std::to_string(k) + " expects input " +
                           std::to_string(layers[k].input_dim()) + " but layer " +
                           std::to_string(k - 1) + " emits " +
                           std::to_string(layers[k - 1].hidden()));
    }
  }
  StackTrace trace;
  trace.layers.reserve(layers.size());
  std::vector<Tensor> below(inputs.begin(), inputs.end());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    trace.layers.push_back(lstm_layer(layers[k], below, init_states[k], active));
    if (k + 1 < layers.size()) {
      for (std::size_t t = 0; t < below.size(); ++t) below[t] = trace.layers[k].steps[t].next.h;
    }
  }
  return trace;
}

StackGrads stack_backward(std::span<LstmCellParams> layers, const StackTrace& trace,
                          std::span<const Tensor> d_top_outputs,
                          std::span<const LstmState> d_finals) {
  StackGrads out;
  out.d_init.resize(layers.size(), LstmState{Tensor({1}), Tensor({1})});
  std::vector<Tensor> d_out(d_top_outputs.begin(), d_top_outputs.end());
  for (std::size_t k = layers.size(); k-- > 0;) {
    LstmSequenceGrads g = lstm_layer_backward(layers[k], trace.layers[k], d_out, d_finals[k]);
    out.d_init[k] = std::move(g.d_init);
    d_out = std::move(g.dx);
  }
  out.dx = std::move(d_out);
  return out;
}

}  // namespace nmt
