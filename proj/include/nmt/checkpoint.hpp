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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "nmt/model.hpp"
#include "nmt/trainer.hpp"

// Binary checkpoint container, little-endian throughout:
//
//   "ATNMTCKP"                      8-byte magic
//   u32 format_version
//   u64 src_vocab, tgt_vocab, embed_dim, hidden, layers, max_decode_len
//   u32 attention mode
//   u64 completed epochs, f64 best validation perplexity
//   u32 optimizer kind, u64 optimizer step
//   u64 rng seed, f64 validation split
//   u32 src vocab crc32, u32 tgt vocab crc32
//   u32 tensor count, then per tensor:
//       u32 name length, name bytes, u32 rank, u64 dims[rank], f64 payload
//   u32 crc32 of every preceding byte
//
// Tensors are the model parameters in canonical order, followed (adam
// only) by "adam.m/<name>" and "adam.v/<name>" for each parameter.

namespace nmt {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  explicit Checkpoint(Model m) : model(std::move(m)) {}

  std::uint32_t format_version = kCheckpointVersion;
  Model model;  // config and parameters
  TrainState train_state;
  std::uint64_t rng_seed = 0;
  double val_split = 0.0;
  std::uint32_t src_vocab_crc = 0;
  std::uint32_t tgt_vocab_crc = 0;
};

std::uint32_t crc32_of(std::string_view bytes);

std::string serialize_checkpoint(const Checkpoint& ckpt);

/// Validation order: magic, checksum, version, config, tensor schema.
/// Throws CorruptionError, VersionError or SchemaError accordingly; never
/// returns a partially loaded model.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nmt
