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
#include <span>
#include <vector>

#include "nmt/tensor.hpp"

// Tensor operations with their hand-derived backward passes. Each *_backward
// takes the upstream gradient of the op's output and returns the gradient
// of its inputs.

namespace nmt {

Tensor matmul(const Tensor& a, const Tensor& b);

struct MatmulGrads {
  Tensor da;
  Tensor db;
};
/// dA = dC·Bᵀ, dB = Aᵀ·dC
MatmulGrads matmul_backward(const Tensor& a, const Tensor& b, const Tensor& dc);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

struct BinaryGrads {
  Tensor da;
  Tensor db;
};
BinaryGrads add_backward(const Tensor& dy);
BinaryGrads mul_backward(const Tensor& a, const Tensor& b, const Tensor& dy);
/// Both take the forward output y, not the input.
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);
Tensor tanh_backward(const Tensor& y, const Tensor& dy);

double sigmoid(double x);

/// Numerically stable softmax over a flat tensor.
Tensor softmax(const Tensor& logits);
/// Jacobian-vector product: dx = y ⊙ (dy − ⟨y, dy⟩).
Tensor softmax_backward(const Tensor& y, const Tensor& dy);

/// log Σ exp(x), max-shifted. Throws DimensionError on empty input.
double log_sum_exp(std::span<const double> x);
void softmax_inplace(std::span<double> x);
std::vector<double> log_softmax(std::span<const double> logits);

struct CrossEntropy {
  double loss;
  Tensor grad;  // softmax(logits) − onehot(target)
};
CrossEntropy cross_entropy(const Tensor& logits, std::size_t target);

}  // namespace nmt
