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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmt/corpus.hpp"
#include "nmt/model.hpp"
#include "nmt/optimizer.hpp"

namespace nmt {

struct TrainConfig {
  std::size_t epochs = 10;  // full passes over the training pairs
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 1;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  void validate() const;
};

struct TrainState {
  std::size_t epoch = 0;  // completed epochs
  OptimizerState optimizer;
  double best_validation_perplexity = std::numeric_limits<double>::infinity();

  std::uint64_t step() const { return optimizer.step; }
  static TrainState fresh(OptimizerKind kind, Model& model);
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // token-weighted mean training NLL
  double validation_perplexity = 0.0;  // NaN without a validation split
  double seconds = 0.0;
  std::uint64_t steps = 0;  // optimizer steps so far
};

/// `epoch=<n> loss=<float> val_ppl=<float> seconds=<float>`
std::string format_log_line(const EpochRecord& record);

struct TrainingLog {
  std::vector<EpochRecord> epochs;
};

/// Where checkpoints and the log go, plus the metadata stored alongside.
struct CheckpointSink {
  std::filesystem::path dir;
  std::uint64_t split_seed = 0;
  double val_split = 0.0;
  std::uint32_t src_vocab_crc = 0;
  std::uint32_t tgt_vocab_crc = 0;
};

inline constexpr const char* kLastCheckpoint = "last.ckpt";
inline constexpr const char* kBestCheckpoint = "best.ckpt";
inline constexpr const char* kTrainLog = "train.log";

/// Runs epochs state.epoch+1 .. config.epochs. Each epoch shuffles under
/// (seed, epoch), and for every batch does forward/backward, clipping and
/// an optimizer step. With a sink, appends one log line per epoch, writes
/// last.ckpt every `checkpoint_every` epochs and after the final epoch, and
/// best.ckpt whenever validation perplexity improves.
///
/// Throws NonFiniteLossError naming the epoch and batch index.
TrainingLog train(Model& model, TrainState& state, std::span<const EncodedPair> train_pairs,
                  std::span<const EncodedPair> validation_pairs, const TrainConfig& config,
                  const std::optional<CheckpointSink>& sink = std::nullopt);

/// Deterministic split: shuffle under `seed`, the last floor(n·fraction)
/// pairs become the validation set.
struct Split {
  std::vector<EncodedPair> train;
  std::vector<EncodedPair> validation;
};
Split split_corpus(std::span<const EncodedPair> pairs, double fraction, std::uint64_t seed);

}  // namespace nmt
