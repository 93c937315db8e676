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

#include <string>
#include <string_view>
#include <vector>

namespace nmt {

/// Word tokenizer shared by English and Gujarati text.
///
/// NFC-normalizes, lowercases every code point that has a simple lowercase
/// mapping, splits on Unicode White_Space, and peels leading and trailing
/// punctuation (general category P*) off each word, one mark per token.
/// Punctuation inside a word ("don't", "e-mail") stays attached.
///
/// Throws EncodingError (with the byte offset) on malformed UTF-8.
std::vector<std::string> tokenize(std::string_view text);

/// Space-joins tokens.
std::string detokenize(const std::vector<std::string>& tokens);

}  // namespace nmt
