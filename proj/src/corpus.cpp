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

#include "nmt/corpus.hpp"

#include <algorithm>
#include <numeric>

#include "nmt/error.hpp"
#include "nmt/io_util.hpp"
#include "nmt/random.hpp"
#include "nmt/tokenizer.hpp"

namespace nmt {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  return split_lines(read_file(path));
}

ParallelCorpus make_parallel_corpus(std::span<const std::string> source_lines,
                                    std::span<const std::string> target_lines) {
  if (source_lines.size() != target_lines.size()) {
    throw AlignmentError("parallel files are misaligned: source has " +
                         std::to_string(source_lines.size()) + " lines, target has " +
                         std::to_string(target_lines.size()));
  }
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < source_lines.size(); ++i) {
    ParallelPair pair{tokenize(source_lines[i]), tokenize(target_lines[i])};
    if (pair.source.empty() || pair.target.empty()) {
      ++corpus.dropped_count;
      continue;
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path) {
  const auto src = read_lines(source_path);
  const auto tgt = read_lines(target_path);
  return make_parallel_corpus(src, tgt);
}

std::vector<EncodedPair> encode_corpus(std::span<const ParallelPair> pairs,
                                       const Vocabulary& source_vocab,
                                       const Vocabulary& target_vocab) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({source_vocab.encode(p.source), target_vocab.encode(p.target)});
  }
  return out;
}

std::size_t Batch::prediction_count() const {
  std::size_t n = 0;
  for (std::size_t len : target_lengths) n += len - 1;
  return n;
}

Batch make_batch(std::span<const EncodedPair> corpus,
                 std::span<const std::size_t> indices) {
  if (indices.empty()) throw ContractError("make_batch: no pairs selected");
  Batch b;
  b.rows = indices.size();
  for (std::size_t idx : indices) {
    if (idx >= corpus.size()) throw IndexError("make_batch: pair index out of range");
    const auto& p = corpus[idx];
    if (p.source.empty() || p.target.empty()) {
      throw ContractError("make_batch: pair " + std::to_string(idx) + " has an empty side");
    }
    b.max_source_len = std::max(b.max_source_len, p.source.size());
    b.max_target_len = std::max(b.max_target_len, p.target.size() + 2);
  }
  b.source_ids.assign(b.rows * b.max_source_len, kPadId);
  b.target_ids.assign(b.rows * b.max_target_len, kPadId);
  for (std::size_t r = 0; r < b.rows; ++r) {
    const auto& p = corpus[indices[r]];
    std::copy(p.source.begin(), p.source.end(), b.source_ids.begin() + r * b.max_source_len);
    TokenId* t = b.target_ids.data() + r * b.max_target_len;
    t[0] = kBosId;
    std::copy(p.target.begin(), p.target.end(), t + 1);
    t[p.target.size() + 1] = kEosId;
    b.source_lengths.push_back(p.source.size());
    b.target_lengths.push_back(p.target.size() + 2);
    b.pair_indices.push_back(indices[r]);
  }
  return b;
}

std::vector<Batch> batch_iter(std::span<const EncodedPair> corpus,
                              std::size_t batch_size, std::uint64_t shuffle_seed) {
  if (batch_size < 1) throw ContractError("batch_iter: batch_size must be >= 1");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(shuffle_seed);
  rng.shuffle(std::span(order));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus[a].source.size() < corpus[b].source.size();
  });

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, order.size() - start);
    batches.push_back(make_batch(corpus, std::span(order).subspan(start, n)));
  }
  rng.shuffle(std::span(batches));
  return batches;
}

}  // namespace nmt
