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

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "nmt/corpus.hpp"
#include "nmt/model.hpp"
#include "nmt/random.hpp"
#include "nmt/tensor.hpp"

namespace nmt::testing {

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline std::vector<TokenId> random_ids(Rng& rng, std::size_t len, std::size_t vocab) {
  std::vector<TokenId> ids(len);
  for (auto& id : ids) id = static_cast<TokenId>(kNumSpecials + rng.below(vocab - kNumSpecials));
  return ids;
}

inline EncodedPair random_pair(Rng& rng, std::size_t max_len, std::size_t src_vocab,
                               std::size_t tgt_vocab) {
  return {random_ids(rng, 1 + rng.below(max_len), src_vocab),
          random_ids(rng, 1 + rng.below(max_len), tgt_vocab)};
}

inline Batch batch_of(std::span<const EncodedPair> pairs) {
  std::vector<std::size_t> idx(pairs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return make_batch(pairs, idx);
}

inline ModelConfig tiny_config(std::size_t vocab = 7, std::size_t embed = 4, std::size_t hidden = 3,
                               std::size_t layers = 2) {
  ModelConfig c;
  c.src_vocab_size = vocab;
  c.tgt_vocab_size = vocab;
  c.embed_dim = embed;
  c.hidden = hidden;
  c.layers = layers;
  c.max_decode_len = 10;
  return c;
}

// Initialized weights are small; scaling them up makes gradients and
// decisions less degenerate in tests.
inline void scale_weights(Model& model, double factor) {
  for (Parameter* p : model.params.parameters()) {
    for (auto& v : p->value.values()) v *= factor;
  }
}

class TempDir {
 public:
  TempDir() {
    Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(
        std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
        std::to_string(std::filesystem::file_time_type::clock::now().time_since_epoch().count()))));
    path_ = std::filesystem::temp_directory_path() / ("attn-nmt-test-" + std::to_string(rng.next()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nmt::testing
