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
#include <functional>
#include <span>
#include <string>

#include "nmt/tensor.hpp"

namespace nmt {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// Evaluates the scalar loss at the current parameter values. When
/// `with_grad` is true it must also accumulate d(loss)/d(param) into every
/// Parameter::grad.
using LossFunction = std::function<double(bool with_grad)>;

/// Compares analytic gradients against central differences
/// (f(x+eps) − f(x−eps)) / 2eps for every entry of every parameter.
///
/// Relative error is |a − n| / max(|a|, |n|, 1e-6); the floor keeps entries
/// whose true gradient is zero from reporting rounding noise as error.
/// Parameter values are restored and gradients left holding the analytic
/// result.
GradCheckReport gradient_check(std::span<Parameter* const> params,
                               const LossFunction& loss, double eps = 1e-5);

}  // namespace nmt
