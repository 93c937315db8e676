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

#include "nmt/optimizer.hpp"

#include <cmath>

#include "nmt/error.hpp"

namespace nmt {

const char* to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerState OptimizerState::create(OptimizerKind kind, std::span<Parameter* const> params) {
  OptimizerState s;
  s.kind = kind;
  if (kind == OptimizerKind::kAdam) {
    for (const Parameter* p : params) {
      s.first_moment.emplace_back(p->value.shape());
      s.second_moment.emplace_back(p->value.shape());
    }
  }
  return s;
}

double global_grad_norm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    for (double g : p->grad.values()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_gradients(std::span<Parameter* const> params, double clip_norm) {
  if (!(clip_norm > 0.0)) throw ContractError("clip_gradients: clip_norm must be positive");
  const double norm = global_grad_norm(params);
  if (!(norm > clip_norm)) return 1.0;
  const double scale = clip_norm / norm;
  for (Parameter* p : params) {
    for (double& g : p->grad.values()) g *= scale;
  }
  return scale;
}

void optimizer_step(std::span<Parameter* const> params, OptimizerState& state, double lr) {
  ++state.step;
  if (state.kind == OptimizerKind::kSgd) {
    for (Parameter* p : params) {
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr * p->grad[i];
      p->zero_grad();
    }
    return;
  }
  if (state.first_moment.size() != params.size()) {
    throw SchemaError("optimizer_step: moment count does not match parameter count");
  }
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    Tensor& m = state.first_moment[k];
    Tensor& v = state.second_moment[k];
    require_same_shape(m, p.value, "adam moment");
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g;
      v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }
    p.zero_grad();
  }
}

}  // namespace nmt
