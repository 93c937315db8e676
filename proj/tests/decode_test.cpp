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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nmt/beam_search.hpp"
#include "nmt/decoder.hpp"
#include "nmt/error.hpp"
#include "nmt/ops.hpp"
#include "nmt/tokenizer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace nmt {
namespace {

using oracle::Seq;

using oracle::TableModel;
using oracle::brute_force_ranking;
using oracle::random_table;

TEST(BeamSearch, WidthTwoFindsTopTwoOfHandBuiltTable) {
  // Vocabulary {0, 1, 2=EOS}, depth 3.
  TableModel m{3, {}};
  m.logits = {
      {{1.0, 0.6, -2.0}, {0, 0, 0}, {0, 0, 0}},
      {{-1.0, 2.0, 0.5}, {0.3, -0.5, 1.5}, {0, 0, 0}},
      {{0.2, 0.1, 1.0}, {1.2, -0.3, 0.4}, {0, 0, 0}},
  };
  DecodeConfig cfg;
  cfg.beam_width = 2;
  cfg.max_decode_len = 3;
  const auto got = beam_search(m, cfg);
  const auto want = brute_force_ranking(m, cfg);
  ASSERT_EQ(got.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(got[i].tokens, want[i].second) << i;
    EXPECT_NEAR(got[i].score, want[i].first, 1e-12);
  }
}

TEST(BeamSearch, WideBeamReturnsBruteForceRanking) {
  Rng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t vocab = 2 + rng.below(3), depth = 1 + rng.below(4);
    const TableModel m = random_table(rng, vocab, depth, 3.0);
    DecodeConfig cfg;
    cfg.eos = static_cast<TokenId>(rng.below(vocab));
    cfg.max_decode_len = depth;
    cfg.length_penalty_alpha = trial % 3 == 0 ? 0.7 : 0.0;
    cfg.beam_width = static_cast<std::size_t>(std::pow(vocab, depth));
    const auto got = beam_search(m, cfg);
    const auto want = brute_force_ranking(m, cfg);
    ASSERT_FALSE(got.empty());
    EXPECT_EQ(got[0].tokens, want[0].second) << "trial " << trial;
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
      EXPECT_NEAR(got[i].score, want[i].first, 1e-12);
    }
  }
}

TEST(BeamSearch, TiesPreferShorterThenLexicographicallySmaller) {
  TableModel m{3, {}};
  m.logits.assign(3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  DecodeConfig cfg;
  cfg.eos = 2;
  cfg.beam_width = 3;
  cfg.max_decode_len = 3;
  const auto got = beam_search(m, cfg);
  // Every round keeps the three lexicographically smallest extensions.
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].tokens, (Seq{2}));
  EXPECT_EQ(got[1].tokens, (Seq{0, 2}));
  EXPECT_EQ(got[2].tokens, (Seq{0, 0, 0}));
  const auto g = greedy_decode(m, cfg);
  EXPECT_EQ(g.tokens, (Seq{0, 0, 0}));
}

TEST(BeamSearch, RejectsZeroWidth) {
  const TableModel m{2, {{{0, 0}, {0, 0}}}};
  DecodeConfig cfg;
  cfg.beam_width = 0;
  EXPECT_THROW(beam_search(m, cfg), ContractError);
}

Model random_model(Rng& rng, std::size_t vocab) {
  ModelConfig c = testing::tiny_config(vocab, 1 + rng.below(5), 1 + rng.below(5), 1 + rng.below(2));
  c.max_decode_len = 2 + rng.below(8);
  Model m = Model::initialized(c, rng.next());
  testing::scale_weights(m, rng.uniform(5, 30));
  return m;
}

TEST(Decode, BeamWidthOneEqualsGreedy) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Model m = random_model(rng, 5 + rng.below(8));
    const auto src = testing::random_ids(rng, 1 + rng.below(6), m.config.src_vocab_size);
    DecodeConfig cfg = default_decode_config(m);
    cfg.beam_width = 1;
    const auto g = greedy_decode(m, src, cfg);
    const auto b = beam_search(m, src, cfg);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(g.tokens, b[0].tokens) << "trial " << trial;
    EXPECT_EQ(g.log_prob, b[0].log_prob);
  }
}

double rescore(const Model& m, std::span<const TokenId> src, const Seq& tokens) {
  if (!tokens.empty() && tokens.back() == kEosId &&
      std::none_of(tokens.begin(), tokens.end() - 1, [](TokenId t) { return t < kNumSpecials; })) {
    const std::vector<EncodedPair> pair = {{{src.begin(), src.end()}, {tokens.begin(), tokens.end() - 1}}};
    if (!pair[0].target.empty()) return -forward_loss(m, testing::batch_of(pair)).total_nll;
  }
  const auto enc = encode(m, src);
  DecoderState state = initial_decoder_state(enc);
  const std::vector<std::size_t> rows = {0};
  TokenId prev = kBosId;
  double lp = 0;
  for (TokenId t : tokens) {
    auto out = decode_step(m, std::span(&prev, 1), state, enc, rows);
    lp += log_softmax(out.logits.values())[t];
    state = std::move(out.state);
    prev = t;
  }
  return lp;
}

TEST(Decode, ScoresEqualForwardRescoring) {
  Rng rng(3);
  std::size_t via_loss = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Model m = random_model(rng, 6 + rng.below(6));
    const auto src = testing::random_ids(rng, 1 + rng.below(5), m.config.src_vocab_size);
    DecodeConfig cfg = default_decode_config(m);
    cfg.beam_width = 1 + rng.below(5);
    for (const auto& h : beam_search(m, src, cfg)) {
      EXPECT_NEAR(h.score, rescore(m, src, h.tokens), 1e-9);
      EXPECT_EQ(h.score, h.log_prob);
      via_loss += h.tokens.back() == kEosId;
    }
    const auto g = greedy_decode(m, src, cfg);
    EXPECT_NEAR(g.log_prob, rescore(m, src, g.tokens), 1e-9);
  }
  EXPECT_GT(via_loss, 0u);
}

TEST(Decode, HypothesisInvariants) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const Model m = random_model(rng, 5 + rng.below(10));
    const auto src = testing::random_ids(rng, 1 + rng.below(6), m.config.src_vocab_size);
    DecodeConfig cfg = default_decode_config(m);
    cfg.beam_width = 1 + rng.below(6);
    const auto hyps = beam_search(m, src, cfg);
    EXPECT_LE(hyps.size(), cfg.beam_width);
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      const auto& h = hyps[i];
      EXPECT_LE(h.log_prob, 0.0);
      EXPECT_LE(h.tokens.size(), cfg.max_decode_len);
      EXPECT_TRUE(h.tokens.back() == kEosId || h.tokens.size() == cfg.max_decode_len);
      EXPECT_EQ(std::count(h.tokens.begin(), h.tokens.end(), kEosId), h.tokens.back() == kEosId ? 1 : 0);
      for (TokenId t : h.tokens) EXPECT_LT(t, m.config.tgt_vocab_size);
      EXPECT_EQ(h.attention.size(), h.tokens.size());
      for (const auto& row : h.attention) {
        double s = 0;
        for (double w : row) s += w;
        EXPECT_NEAR(s, 1.0, 1e-9);
      }
      if (i) {
        EXPECT_FALSE(ranks_before(h.score, h.tokens, hyps[i - 1].score, hyps[i - 1].tokens));
      }
    }
    const auto again = beam_search(m, src, cfg);
    ASSERT_EQ(again.size(), hyps.size());
    for (std::size_t i = 0; i < hyps.size(); ++i) EXPECT_EQ(again[i].tokens, hyps[i].tokens);
  }
}

TEST(Decode, UniformModelEmitsLowestIdUntilCap) {
  ModelConfig c = testing::tiny_config(9, 3, 3);
  c.max_decode_len = 6;
  Model m = Model::initialized(c, 5);
  m.params.W_out.value.fill(0);
  const std::vector<TokenId> src = {4, 5};
  const auto g = greedy_decode(m, src, default_decode_config(m));
  EXPECT_EQ(g.tokens, Seq(6, 0));
  EXPECT_NEAR(g.log_prob, -6 * std::log(9.0), 1e-12);
}

TEST(Decode, LengthPenaltyDividesByLengthPower) {
  TableModel m{3, {}};
  m.logits.assign(4, std::vector<std::vector<double>>(3, {0.0, 0.0, -1.0}));
  DecodeConfig cfg;
  cfg.eos = 2;
  cfg.beam_width = 27;
  cfg.max_decode_len = 3;
  cfg.length_penalty_alpha = 1.0;
  for (const auto& h : beam_search(m, cfg)) {
    EXPECT_NEAR(h.score, h.log_prob / static_cast<double>(h.tokens.size()), 1e-15);
  }
}

TEST(Translate, EmptyInputAndAttentionShape) {
  const Vocabulary src_vocab(std::vector<std::string>{"a", "b", "."});
  const Vocabulary tgt_vocab(std::vector<std::string>{"x", "y"});
  ModelConfig c = testing::tiny_config();
  c.src_vocab_size = src_vocab.size();
  c.tgt_vocab_size = tgt_vocab.size();
  Model m = Model::initialized(c, 6);
  testing::scale_weights(m, 20);
  const DecodeConfig cfg = default_decode_config(m);
  EXPECT_THROW(translate("", src_vocab, tgt_vocab, m, cfg), EmptyInputError);
  EXPECT_THROW(translate("   ", src_vocab, tgt_vocab, m, cfg), EmptyInputError);
  const Translation t = translate("A zzz b.", src_vocab, tgt_vocab, m, cfg);
  EXPECT_EQ(t.source_tokens, (std::vector<std::string>{"a", "zzz", "b", "."}));
  EXPECT_EQ(t.attention.size(), t.ids.size());
  for (const auto& row : t.attention) {
    ASSERT_EQ(row.size(), 4u);
    double s = 0;
    for (double w : row) s += w;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_EQ(t.text, detokenize(t.tokens));
  std::ostringstream dump;
  write_attention(dump, t, tgt_vocab);
  std::istringstream lines(dump.str());
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    EXPECT_EQ(line.substr(0, tab), tgt_vocab.token(t.ids[n]));
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
  }
  EXPECT_EQ(n, t.ids.size());
}

}  // namespace
}  // namespace nmt
