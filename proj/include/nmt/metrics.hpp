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
#include <string>
#include <vector>

#include "nmt/beam_search.hpp"
#include "nmt/corpus.hpp"
#include "nmt/model.hpp"

namespace nmt {

using Sentence = std::vector<std::string>;

/// Word-level Levenshtein distance (insert, delete, substitute; no shifts).
std::size_t edit_distance(std::span<const std::string> candidate,
                          std::span<const std::string> reference);

/// edits / reference length. Throws ContractError for an empty reference.
double ter(std::span<const std::string> candidate, std::span<const std::string> reference);

struct TerResult {
  double ter = 0.0;  // total edits / total reference words
  std::vector<std::size_t> edits;  // per sentence
  std::size_t total_edits = 0;
  std::size_t reference_words = 0;
};

TerResult corpus_ter(std::span<const Sentence> candidates, std::span<const Sentence> references);

struct BleuResult {
  double bleu = 0.0;  // in [0, 1]
  std::vector<double> precisions;  // p_1 .. p_max_n
  std::vector<std::size_t> matches;  // clipped matches per order
  std::vector<std::size_t> totals;   // candidate n-grams per order
  double brevity_penalty = 0.0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

/// Corpus BLEU with a single reference per sentence: clipped n-gram
/// precisions summed over the corpus, uniform weights, standard brevity
/// penalty, no smoothing (any p_n = 0 gives BLEU 0).
///
/// An order with no n-grams in either candidates or references is vacuous
/// and scores p_n = 1; an order with reference n-grams but no candidate
/// n-grams scores 0. The brevity penalty is 0 when every candidate is empty.
BleuResult bleu(std::span<const Sentence> candidates, std::span<const Sentence> references,
                std::size_t max_n = 4);

struct PerplexityResult {
  double perplexity = 0.0;
  double total_nll = 0.0;
  std::size_t token_count = 0;
};

/// exp(total teacher-forced NLL / predicted tokens); EOS is predicted, PAD
/// is not. Pairs are scored in order, `batch_size` at a time.
PerplexityResult perplexity(const Model& model, std::span<const EncodedPair> pairs,
                            std::size_t batch_size = 32);

struct MetricReport {
  BleuResult bleu;
  TerResult ter;
  PerplexityResult perplexity;
  std::size_t sentences = 0;
};

/// Beam-decodes every source, scores the hypotheses against the reference
/// tokens with corpus BLEU and TER, and measures teacher-forced perplexity.
MetricReport evaluate(const Model& model, std::span<const ParallelPair> test_pairs,
                      const Vocabulary& source_vocab, const Vocabulary& target_vocab,
                      const DecodeConfig& decode_config);

/// key=value lines in a fixed order.
std::string format_report(const MetricReport& report);

}  // namespace nmt
