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

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include "nmt/error.hpp"
#include "nmt/vocab.hpp"

namespace nmt {

struct DecodeConfig {
  std::size_t beam_width = 5;
  std::size_t max_decode_len = 50;
  double length_penalty_alpha = 0.0;  // 0 → raw log-probability
  TokenId eos = kEosId;
};

/// Output of a decoder step: the state after consuming a token, the
/// distribution over the next token, and the attention row (if any) that
/// produced it.
template <typename State>
struct SearchStep {
  State state;
  std::vector<double> log_probs;
  std::vector<double> attention;
};

template <typename M>
concept StepModel = requires(const M& m, const typename M::State& s, TokenId t) {
  { m.start() } -> std::same_as<SearchStep<typename M::State>>;
  { m.advance(s, t) } -> std::same_as<SearchStep<typename M::State>>;
};

struct SearchResult {
  std::vector<TokenId> tokens;  // includes the terminating EOS if emitted
  double log_prob = 0.0;
  double score = 0.0;
  std::vector<std::vector<double>> attention;  // one row per emitted token
};

inline double length_normalized(double log_prob, std::size_t length, double alpha) {
  if (alpha == 0.0) return log_prob;
  return log_prob / std::pow(static_cast<double>(length), alpha);
}

/// Ranking used everywhere: higher score, then shorter, then the
/// lexicographically smaller token sequence.
inline bool ranks_before(double score_a, const std::vector<TokenId>& a, double score_b,
                         const std::vector<TokenId>& b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Argmax at every step (lowest id on ties) until EOS or the length cap.
template <StepModel M>
SearchResult greedy_decode(const M& model, const DecodeConfig& config) {
  if (config.max_decode_len < 1) throw ContractError("greedy_decode: max_decode_len must be >= 1");
  SearchResult out;
  auto step = model.start();
  while (true) {
    const auto& lp = step.log_probs;
    const auto best = static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    out.log_prob += lp[best];
    out.tokens.push_back(best);
    out.attention.push_back(std::move(step.attention));
    if (best == config.eos || out.tokens.size() >= config.max_decode_len) break;
    step = model.advance(step.state, best);
  }
  out.score = length_normalized(out.log_prob, out.tokens.size(), config.length_penalty_alpha);
  return out;
}

/// Standard beam search. Each round expands every live hypothesis over the
/// whole vocabulary and keeps the best `beam_width` candidates; candidates
/// ending in EOS or reaching the length cap are set aside as finished. The
/// search stops once `beam_width` hypotheses have finished or none are
/// live. Returns up to `beam_width` finished hypotheses, best first.
template <StepModel M>
std::vector<SearchResult> beam_search(const M& model, const DecodeConfig& config) {
  if (config.beam_width < 1) throw ContractError("beam_search: beam_width must be >= 1");
  if (config.max_decode_len < 1) throw ContractError("beam_search: max_decode_len must be >= 1");

  struct Live {
    SearchResult partial;
    SearchStep<typename M::State> next;
  };
  struct Candidate {
    std::size_t parent;
    TokenId token;
    double log_prob;
    double score;
  };

  std::vector<Live> live;
  live.push_back({SearchResult{}, model.start()});
  std::vector<SearchResult> finished;
  std::vector<Candidate> cands;
  std::vector<TokenId> seq_a, seq_b;

  auto before = [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    // Same round, so same length: compare parent prefix + token.
    const auto& pa = live[a.parent].partial.tokens;
    const auto& pb = live[b.parent].partial.tokens;
    if (a.parent != b.parent) {
      const auto cmp = std::lexicographical_compare_three_way(pa.begin(), pa.end(), pb.begin(),
                                                              pb.end());
      if (cmp != 0) return cmp < 0;
    }
    return a.token < b.token;
  };

  while (!live.empty() && finished.size() < config.beam_width) {
    cands.clear();
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& lp = live[i].next.log_probs;
      const std::size_t len = live[i].partial.tokens.size() + 1;
      for (std::size_t v = 0; v < lp.size(); ++v) {
        const double total = live[i].partial.log_prob + lp[v];
        cands.push_back({i, static_cast<TokenId>(v), total,
                         length_normalized(total, len, config.length_penalty_alpha)});
      }
    }
    const std::size_t keep = std::min(config.beam_width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), before);

    std::vector<Live> next_live;
    for (std::size_t c = 0; c < keep; ++c) {
      const Candidate& cand = cands[c];
      const Live& parent = live[cand.parent];
      SearchResult r;
      r.tokens = parent.partial.tokens;
      r.tokens.push_back(cand.token);
      r.log_prob = cand.log_prob;
      r.score = cand.score;
      r.attention = parent.partial.attention;
      r.attention.push_back(parent.next.attention);
      if (cand.token == config.eos || r.tokens.size() >= config.max_decode_len) {
        finished.push_back(std::move(r));
      } else {
        auto step = model.advance(parent.next.state, cand.token);
        next_live.push_back({std::move(r), std::move(step)});
      }
    }
    live = std::move(next_live);
  }

  std::sort(finished.begin(), finished.end(), [](const SearchResult& a, const SearchResult& b) {
    return ranks_before(a.score, a.tokens, b.score, b.tokens);
  });
  if (finished.size() > config.beam_width) finished.resize(config.beam_width);
  return finished;
}

}  // namespace nmt
