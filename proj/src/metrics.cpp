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

#include "nmt/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "nmt/decoder.hpp"
#include "nmt/error.hpp"
#include "nmt/kernels.hpp"

namespace nmt {

std::size_t edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double ter(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (reference.empty()) throw ContractError("ter: reference must be non-empty");
  return static_cast<double>(edit_distance(candidate, reference)) /
         static_cast<double>(reference.size());
}

TerResult corpus_ter(std::span<const Sentence> candidates, std::span<const Sentence> references) {
  if (candidates.size() != references.size()) {
    throw ContractError("corpus_ter: " + std::to_string(candidates.size()) + " candidates vs " +
                        std::to_string(references.size()) + " references");
  }
  TerResult r;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) throw ContractError("corpus_ter: empty reference sentence");
    const std::size_t e = edit_distance(candidates[i], references[i]);
    r.edits.push_back(e);
    r.total_edits += e;
    r.reference_words += references[i].size();
  }
  if (r.reference_words == 0) throw ContractError("corpus_ter: no reference words");
  r.ter = static_cast<double>(r.total_edits) / static_cast<double>(r.reference_words);
  return r;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const Sentence& s, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[std::vector<std::string>(s.begin() + static_cast<std::ptrdiff_t>(i),
                                      s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuResult bleu(std::span<const Sentence> candidates, std::span<const Sentence> references,
                std::size_t max_n) {
  if (candidates.size() != references.size()) {
    throw ContractError("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                        std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) throw ContractError("bleu: at least one sentence pair required");
  if (max_n < 1) throw ContractError("bleu: max_n must be >= 1");

  BleuResult r;
  r.matches.assign(max_n, 0);
  r.totals.assign(max_n, 0);
  std::vector<std::size_t> ref_totals(max_n, 0);
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    r.candidate_length += candidates[s].size();
    r.reference_length += references[s].size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      const NgramCounts cand = count_ngrams(candidates[s], n);
      const NgramCounts ref = count_ngrams(references[s], n);
      for (const auto& [gram, count] : cand) {
        r.totals[n - 1] += count;
        auto it = ref.find(gram);
        if (it != ref.end()) r.matches[n - 1] += std::min(count, it->second);
      }
      for (const auto& [gram, count] : ref) ref_totals[n - 1] += count;
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < max_n; ++n) {
    double p;
    if (r.totals[n] > 0) {
      p = static_cast<double>(r.matches[n]) / static_cast<double>(r.totals[n]);
    } else {
      p = ref_totals[n] == 0 ? 1.0 : 0.0;
    }
    r.precisions.push_back(p);
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p) / static_cast<double>(max_n);
    }
  }

  const double c = static_cast<double>(r.candidate_length);
  const double ref_len = static_cast<double>(r.reference_length);
  if (r.candidate_length == 0) {
    r.brevity_penalty = 0.0;
  } else if (c > ref_len) {
    r.brevity_penalty = 1.0;
  } else {
    r.brevity_penalty = std::exp(1.0 - ref_len / c);
  }
  r.bleu = zero ? 0.0 : r.brevity_penalty * std::exp(log_sum);
  return r;
}

PerplexityResult perplexity(const Model& model, std::span<const EncodedPair> pairs,
                            std::size_t batch_size) {
  if (pairs.empty()) throw ContractError("perplexity: empty corpus");
  if (batch_size < 1) throw ContractError("perplexity: batch_size must be >= 1");
  PerplexityResult r;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    idx.clear();
    for (std::size_t i = start; i < std::min(pairs.size(), start + batch_size); ++i) idx.push_back(i);
    const LossResult loss = forward_loss(model, make_batch(pairs, idx));
    r.total_nll += loss.total_nll;
    r.token_count += loss.token_count;
  }
  if (r.token_count == 0) throw ContractError("perplexity: no target tokens");
  r.perplexity = std::exp(r.total_nll / static_cast<double>(r.token_count));
  return r;
}

MetricReport evaluate(const Model& model, std::span<const ParallelPair> test_pairs,
                      const Vocabulary& source_vocab, const Vocabulary& target_vocab,
                      const DecodeConfig& decode_config) {
  if (test_pairs.empty()) throw ContractError("evaluate: empty test corpus");
  std::vector<Sentence> hyps(test_pairs.size());
  std::vector<Sentence> refs;
  refs.reserve(test_pairs.size());
  for (const auto& p : test_pairs) refs.push_back(p.target);

  std::vector<std::string> errors(test_pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(test_pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto ids = source_vocab.encode(test_pairs[i].source);
      auto results = beam_search(model, ids, decode_config);
      std::span<const TokenId> body(results.front().tokens);
      if (!body.empty() && body.back() == decode_config.eos) body = body.first(body.size() - 1);
      hyps[i] = target_vocab.decode(body);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ContractError("evaluate: decoding failed: " + e);
  }

  MetricReport report;
  report.sentences = test_pairs.size();
  report.bleu = bleu(hyps, refs);
  report.ter = corpus_ter(hyps, refs);
  const auto encoded = encode_corpus(test_pairs, source_vocab, target_vocab);
  report.perplexity = perplexity(model, encoded);
  return report;
}

std::string format_report(const MetricReport& r) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto num = [](double v) { return fmt::format("{:.6f}", v); };
  line("bleu", num(r.bleu.bleu));
  line("bleu_x100", fmt::format("{:.2f}", 100.0 * r.bleu.bleu));
  for (std::size_t n = 0; n < r.bleu.precisions.size(); ++n) {
    line("p" + std::to_string(n + 1), num(r.bleu.precisions[n]));
  }
  line("bp", num(r.bleu.brevity_penalty));
  line("ter", num(r.ter.ter));
  line("ppl", num(r.perplexity.perplexity));
  line("sentences", std::to_string(r.sentences));
  line("candidate_tokens", std::to_string(r.bleu.candidate_length));
  line("reference_tokens", std::to_string(r.bleu.reference_length));
  line("ter_edits", std::to_string(r.ter.total_edits));
  line("ppl_tokens", std::to_string(r.perplexity.token_count));
  return out;
}

}  // namespace nmt
