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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nmt/vocab.hpp"

namespace nmt {

struct ParallelPair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

struct ParallelCorpus {
  std::vector<ParallelPair> pairs;
  std::size_t dropped_count = 0;  // pairs with a blank side
};

/// Line i of each file forms pair i. Pairs whose source or target tokenizes
/// to nothing are dropped and counted. Line-count disagreement throws
/// AlignmentError; unreadable files throw IoError.
ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path);

/// Same policy over in-memory line lists.
ParallelCorpus make_parallel_corpus(std::span<const std::string> source_lines,
                                    std::span<const std::string> target_lines);

std::vector<std::string> read_lines(const std::filesystem::path& path);

struct EncodedPair {
  std::vector<TokenId> source;
  std::vector<TokenId> target;  // no BOS/EOS
};

std::vector<EncodedPair> encode_corpus(std::span<const ParallelPair> pairs,
                                       const Vocabulary& source_vocab,
                                       const Vocabulary& target_vocab);

/// Padded id matrices for a group of pairs. Target rows are
/// BOS, tokens..., EOS, PAD...
struct Batch {
  std::size_t rows = 0;
  std::size_t max_source_len = 0;
  std::size_t max_target_len = 0;
  std::vector<TokenId> source_ids;  // rows × max_source_len
  std::vector<TokenId> target_ids;  // rows × max_target_len
  std::vector<std::size_t> source_lengths;
  std::vector<std::size_t> target_lengths;  // includes BOS and EOS
  std::vector<std::size_t> pair_indices;    // positions in the source corpus

  TokenId source(std::size_t r, std::size_t t) const { return source_ids[r * max_source_len + t]; }
  TokenId target(std::size_t r, std::size_t t) const { return target_ids[r * max_target_len + t]; }
  /// Number of predicted target tokens (everything after BOS).
  std::size_t prediction_count() const;
};

/// Throws ContractError for an empty selection or an empty source/target.
Batch make_batch(std::span<const EncodedPair> corpus,
                 std::span<const std::size_t> indices);

/// One epoch of batches. Pairs are shuffled under `shuffle_seed`, bucketed
/// by source length, cut into batches of `batch_size`, and the batch order
/// is shuffled again. Every pair appears exactly once.
std::vector<Batch> batch_iter(std::span<const EncodedPair> corpus,
                              std::size_t batch_size, std::uint64_t shuffle_seed);

}  // namespace nmt
