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

#include "nmt/tokenizer.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>

#include "nmt/error.hpp"

namespace nmt {
namespace {

void validate_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw EncodingError("invalid UTF-8 at byte offset " + std::to_string(start),
                          static_cast<std::size_t>(start));
    }
  }
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, c);
  out.append(buf, static_cast<std::size_t>(n));
}

void emit_word(const std::u32string& word, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  std::vector<std::string> trailing;
  while (begin < end && u_ispunct(word[begin])) {
    std::string t;
    append_utf8(t, static_cast<UChar32>(word[begin++]));
    out.push_back(std::move(t));
  }
  while (end > begin && u_ispunct(word[end - 1])) {
    std::string t;
    append_utf8(t, static_cast<UChar32>(word[--end]));
    trailing.push_back(std::move(t));
  }
  if (begin < end) {
    std::string core;
    for (std::size_t i = begin; i < end; ++i) append_utf8(core, static_cast<UChar32>(word[i]));
    out.push_back(std::move(core));
  }
  out.insert(out.end(), std::make_move_iterator(trailing.rbegin()),
             std::make_move_iterator(trailing.rend()));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  validate_utf8(text);

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kEncoding, "ICU NFC normalizer unavailable");
  const icu::UnicodeString normalized = nfc->normalize(
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size()))),
      status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kEncoding, "NFC normalization failed");

  std::vector<std::string> tokens;
  std::u32string word;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      if (!word.empty()) emit_word(word, tokens);
      word.clear();
    } else {
      word.push_back(static_cast<char32_t>(u_tolower(c)));
    }
  }
  if (!word.empty()) emit_word(word, tokens);
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace nmt
