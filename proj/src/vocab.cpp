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

#include "nmt/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nmt/error.hpp"
#include "nmt/io_util.hpp"

namespace nmt {

namespace {
constexpr std::string_view kHeaderPrefix = "attn-nmt-vocab v1 size=";

bool is_special(std::string_view token) {
  return std::find(Vocabulary::kSpecialTokens.begin(),
                   Vocabulary::kSpecialTokens.end(),
                   token) != Vocabulary::kSpecialTokens.end();
}
}  // namespace

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> regular) {
  id_to_token_.reserve(kNumSpecials + regular.size());
  for (std::string_view s : kSpecialTokens) id_to_token_.emplace_back(s);
  for (auto& t : regular) {
    if (is_special(t)) throw SchemaError("vocabulary token '" + t + "' collides with a special token");
    id_to_token_.push_back(std::move(t));
  }
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (id_to_token_[i].empty()) throw SchemaError("vocabulary contains an empty token");
    auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
    if (!inserted) throw SchemaError("duplicate vocabulary token '" + id_to_token_[i] + "'");
  }
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.contains(std::string(token));
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= id_to_token_.size()) {
    throw IndexError("token id " + std::to_string(id) +
                     " out of range for vocabulary of size " +
                     std::to_string(id_to_token_.size()));
  }
  return id_to_token_[id];
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (TokenId i : ids) tokens.push_back(token(i));
  return tokens;
}

std::string Vocabulary::serialize() const {
  std::string out(kHeaderPrefix);
  out += std::to_string(size());
  out += '\n';
  for (std::size_t i = kNumSpecials; i < id_to_token_.size(); ++i) {
    out += id_to_token_[i];
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty() || !lines[0].starts_with(kHeaderPrefix)) {
    throw SchemaError("vocabulary file lacks the 'attn-nmt-vocab v1' header");
  }
  std::size_t declared = 0;
  try {
    std::size_t pos = 0;
    const std::string num = lines[0].substr(kHeaderPrefix.size());
    declared = std::stoul(num, &pos);
    if (pos != num.size()) throw std::invalid_argument(num);
  } catch (const std::logic_error&) {
    throw SchemaError("vocabulary header has a malformed size field: " + lines[0]);
  }
  std::vector<std::string> regular(std::make_move_iterator(lines.begin() + 1),
                                   std::make_move_iterator(lines.end()));
  if (declared != regular.size() + kNumSpecials) {
    throw SchemaError("vocabulary header declares size " + std::to_string(declared) +
                      " but the file holds " + std::to_string(regular.size() + kNumSpecials));
  }
  return Vocabulary(std::move(regular));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

Vocabulary build_vocab(std::span<const std::vector<std::string>> corpus,
                       std::size_t max_size, std::size_t min_freq) {
  if (max_size < kNumSpecials + 1) throw ContractError("build_vocab: max_size must be >= 5");
  if (min_freq < 1) throw ContractError("build_vocab: min_freq must be >= 1");

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) {
      if (!is_special(t)) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [token, n] : counts) {
    if (n >= min_freq) entries.emplace_back(token, n);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t keep = std::min(entries.size(), max_size - kNumSpecials);
  std::vector<std::string> regular;
  regular.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) regular.push_back(std::move(entries[i].first));
  return Vocabulary(std::move(regular));
}

}  // namespace nmt
