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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nmt {

using TokenId = std::uint32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr std::size_t kNumSpecials = 4;

/// Bijective token <-> id map. Ids 0..3 are always PAD, BOS, EOS, UNK.
class Vocabulary {
 public:
  static constexpr std::array<std::string_view, kNumSpecials> kSpecialTokens = {
      "<pad>", "<s>", "</s>", "<unk>"};

  /// Specials only.
  Vocabulary();
  /// Specials followed by `regular` in order. Duplicates or special names
  /// throw SchemaError.
  explicit Vocabulary(std::vector<std::string> regular);

  std::size_t size() const noexcept { return id_to_token_.size(); }
  bool contains(std::string_view token) const;
  /// UNK for unknown tokens.
  TokenId id(std::string_view token) const;
  /// Throws IndexError for id ≥ size().
  const std::string& token(TokenId id) const;

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  /// File form: header line `attn-nmt-vocab v1 size=<n>` (n counts the
  /// specials), then one regular token per line starting at id 4.
  std::string serialize() const;
  static Vocabulary parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

/// Specials, then tokens with frequency ≥ min_freq ordered by (frequency
/// desc, token asc), truncated to max_size entries in total.
Vocabulary build_vocab(std::span<const std::vector<std::string>> corpus,
                       std::size_t max_size = 15000, std::size_t min_freq = 1);

}  // namespace nmt
