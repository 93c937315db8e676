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

#include "nmt/trainer.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "nmt/checkpoint.hpp"
#include "nmt/error.hpp"
#include "nmt/metrics.hpp"
#include "nmt/random.hpp"

namespace nmt {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ContractError("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ContractError("train: learning rate must be positive");
  if (!(clip_norm > 0.0)) throw ContractError("train: clip_norm must be positive");
  if (checkpoint_every < 1) throw ContractError("train: checkpoint_every must be >= 1");
}

TrainState TrainState::fresh(OptimizerKind kind, Model& model) {
  TrainState s;
  s.optimizer = OptimizerState::create(kind, model.params.parameters());
  return s;
}

std::string format_log_line(const EpochRecord& r) {
  return fmt::format("epoch={} loss={:.6f} val_ppl={:.6f} seconds={:.3f}", r.epoch, r.loss,
                     r.validation_perplexity, r.seconds);
}

Split split_corpus(std::span<const EncodedPair> pairs, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ContractError("validation split must be in [0, 1)");
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(order));
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(pairs.size()) * fraction));
  Split s;
  const std::size_t n_train = pairs.size() - n_val;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? s.train : s.validation).push_back(pairs[order[i]]);
  }
  return s;
}

namespace {

Checkpoint make_checkpoint(const Model& model, const TrainState& state, const CheckpointSink& sink) {
  Checkpoint ck{model};
  ck.train_state = state;
  ck.rng_seed = sink.split_seed;
  ck.val_split = sink.val_split;
  ck.src_vocab_crc = sink.src_vocab_crc;
  ck.tgt_vocab_crc = sink.tgt_vocab_crc;
  return ck;
}

}  // namespace

TrainingLog train(Model& model, TrainState& state, std::span<const EncodedPair> train_pairs,
                  std::span<const EncodedPair> validation_pairs, const TrainConfig& config,
                  const std::optional<CheckpointSink>& sink) {
  config.validate();
  if (train_pairs.empty()) throw ContractError("train: empty training corpus");
  if (state.optimizer.kind != config.optimizer) {
    throw ContractError("train: optimizer state does not match the configured optimizer");
  }
  const auto params = model.params.parameters();
  TrainingLog log;

  std::ofstream log_file;
  if (sink) {
    std::error_code ec;
    std::filesystem::create_directories(sink->dir, ec);
    log_file.open(sink->dir / kTrainLog, std::ios::app);
    if (!log_file) throw IoError("cannot open training log in '" + sink->dir.string() + "'");
  }

  for (std::size_t epoch = state.epoch + 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto batches = batch_iter(train_pairs, config.batch_size, derive_seed(config.seed, epoch));
    double nll = 0.0;
    std::size_t tokens = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      model.params.zero_grads();
      const LossResult loss = forward_backward(model, batches[b]);
      if (!std::isfinite(loss.mean_loss)) {
        throw NonFiniteLossError("non-finite loss in epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(b));
      }
      clip_gradients(params, config.clip_norm);
      optimizer_step(params, state.optimizer, config.learning_rate);
      nll += loss.total_nll;
      tokens += loss.token_count;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = nll / static_cast<double>(tokens);
    rec.validation_perplexity = validation_pairs.empty()
                                    ? std::nan("")
                                    : perplexity(model, validation_pairs, config.batch_size).perplexity;
    rec.steps = state.optimizer.step;
    state.epoch = epoch;
    const bool improved = !validation_pairs.empty() &&
                          rec.validation_perplexity < state.best_validation_perplexity;
    if (improved) state.best_validation_perplexity = rec.validation_perplexity;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(rec);

    if (sink) {
      log_file << format_log_line(rec) << '\n';
      log_file.flush();
      if (!log_file) throw IoError("cannot append to the training log");
      const Checkpoint ck = make_checkpoint(model, state, *sink);
      if (improved) save_checkpoint(sink->dir / kBestCheckpoint, ck);
      if (epoch % config.checkpoint_every == 0 || epoch == config.epochs) {
        save_checkpoint(sink->dir / kLastCheckpoint, ck);
      }
    }
  }
  return log;
}

}  // namespace nmt
