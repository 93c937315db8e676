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

// Synthetic copy and reversal tasks over a small symbol alphabet.

#include <algorithm>
#include <chrono>
#include <string>
#include <vector>

#include "nmt/decoder.hpp"
#include "nmt/metrics.hpp"
#include "nmt/random.hpp"
#include "nmt/trainer.hpp"
#include "nmt/vocab.hpp"

namespace nmt::tasks {

struct SequenceTask {
  Vocabulary vocab;
  std::vector<EncodedPair> train;
  std::vector<EncodedPair> test;
};

struct TaskShape {
  std::size_t symbols = 20;
  std::size_t min_len = 3;
  std::size_t max_len = 8;
  std::size_t train_pairs = 500;
  std::size_t test_pairs = 100;
  bool reverse = false;
  std::uint64_t data_seed = 1;
};

inline SequenceTask make_sequence_task(const TaskShape& shape) {
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < shape.symbols; ++i) symbols.push_back("s" + std::to_string(i));
  SequenceTask task{Vocabulary(symbols), {}, {}};
  Rng rng(shape.data_seed);
  auto draw = [&] {
    EncodedPair p;
    const std::size_t len = shape.min_len + rng.below(shape.max_len - shape.min_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
      p.source.push_back(static_cast<TokenId>(kNumSpecials + rng.below(shape.symbols)));
    }
    p.target = p.source;
    if (shape.reverse) std::reverse(p.target.begin(), p.target.end());
    return p;
  };
  for (std::size_t i = 0; i < shape.train_pairs; ++i) task.train.push_back(draw());
  for (std::size_t i = 0; i < shape.test_pairs; ++i) task.test.push_back(draw());
  return task;
}

struct TaskResult {
  double exact_match = 0.0;
  double bleu = 0.0;
  std::uint64_t steps = 0;
  double seconds = 0.0;
  double final_loss = 0.0;
};

struct TaskTraining {
  ModelConfig model;
  TrainConfig train;
  std::uint64_t init_seed = 1;
};

// Trains on task.train and scores greedy decodes of task.test.
inline TaskResult run_sequence_task(const SequenceTask& task, const TaskTraining& setup) {
  const auto t0 = std::chrono::steady_clock::now();
  Model model = Model::initialized(setup.model, setup.init_seed);
  TrainState state = TrainState::fresh(setup.train.optimizer, model);
  const TrainingLog log = train(model, state, task.train, {}, setup.train);

  DecodeConfig dc = default_decode_config(model);
  dc.beam_width = 1;
  std::size_t exact = 0;
  std::vector<Sentence> hyps, refs;
  for (const auto& p : task.test) {
    const SearchResult r = greedy_decode(model, p.source, dc);
    std::vector<TokenId> out = r.tokens;
    if (!out.empty() && out.back() == kEosId) out.pop_back();
    exact += out == p.target;
    hyps.push_back(task.vocab.decode(out));
    refs.push_back(task.vocab.decode(p.target));
  }
  TaskResult res;
  res.exact_match = static_cast<double>(exact) / static_cast<double>(task.test.size());
  res.bleu = bleu(hyps, refs).bleu;
  res.steps = state.step();
  res.final_loss = log.epochs.empty() ? 0.0 : log.epochs.back().loss;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace nmt::tasks
