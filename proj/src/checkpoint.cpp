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

#include "nmt/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "nmt/error.hpp"
#include "nmt/io_util.hpp"

namespace nmt {
namespace {

constexpr std::string_view kMagic = "ATNMTCKP";
constexpr std::uint64_t kMaxRank = 8;

class Writer {
 public:
  void bytes(std::string_view s) { out_.append(s); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void tensor(const std::string& name, const Tensor& t) {
    u32(static_cast<std::uint32_t>(name.size()));
    bytes(name);
    u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) u64(d);
    for (double v : t.values()) f64(v);
  }
  std::string take() { return std::move(out_); }
  std::string_view view() const { return out_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  bool at_end() const { return pos_ == data_.size(); }

  /// Reads one record and checks it against the expected name and shape.
  void tensor_into(const std::string& want_name, Tensor& dst) {
    const std::uint32_t name_len = u32();
    const std::string name(bytes(name_len));
    if (name != want_name) {
      throw SchemaError("checkpoint tensor '" + name + "' found where '" + want_name +
                        "' was expected");
    }
    const std::uint64_t rank = u32();
    if (rank == 0 || rank > kMaxRank) throw SchemaError("checkpoint tensor '" + name + "' has bad rank");
    Shape shape;
    for (std::uint64_t i = 0; i < rank; ++i) shape.push_back(static_cast<std::size_t>(u64()));
    if (shape != dst.shape()) {
      throw SchemaError("checkpoint tensor '" + name + "' has shape " + shape_string(shape) +
                        " but the config implies " + shape_string(dst.shape()));
    }
    need(dst.size() * 8);
    for (double& v : dst.values()) v = f64();
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw CorruptionError("checkpoint is truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, n);
    p += n;
    left -= n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string serialize_checkpoint(const Checkpoint& ck) {
  const ModelConfig& c = ck.model.config;
  const TrainState& ts = ck.train_state;
  Writer w;
  w.bytes(kMagic);
  w.u32(ck.format_version);
  for (std::size_t v : {c.src_vocab_size, c.tgt_vocab_size, c.embed_dim, c.hidden, c.layers,
                        c.max_decode_len}) {
    w.u64(v);
  }
  w.u32(static_cast<std::uint32_t>(c.attention));
  w.u64(ts.epoch);
  w.f64(ts.best_validation_perplexity);
  w.u32(static_cast<std::uint32_t>(ts.optimizer.kind));
  w.u64(ts.optimizer.step);
  w.u64(ck.rng_seed);
  w.f64(ck.val_split);
  w.u32(ck.src_vocab_crc);
  w.u32(ck.tgt_vocab_crc);

  const auto params = ck.model.params.parameters();
  const bool adam = ts.optimizer.kind == OptimizerKind::kAdam;
  if (adam && (ts.optimizer.first_moment.size() != params.size() ||
               ts.optimizer.second_moment.size() != params.size())) {
    throw SchemaError("checkpoint: adam moments do not mirror the parameters");
  }
  w.u32(static_cast<std::uint32_t>(params.size() * (adam ? 3 : 1)));
  for (const Parameter* p : params) w.tensor(p->name, p->value);
  if (adam) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.tensor("adam.m/" + params[i]->name, ts.optimizer.first_moment[i]);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.tensor("adam.v/" + params[i]->name, ts.optimizer.second_moment[i]);
    }
  }
  w.u32(crc32_of(w.view()));
  return w.take();
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CorruptionError("not a checkpoint file (bad magic bytes)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.u32() != crc32_of(body)) throw CorruptionError("checkpoint checksum mismatch");

  Reader r(body);
  r.bytes(kMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint format version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  ModelConfig c;
  c.src_vocab_size = r.u64();
  c.tgt_vocab_size = r.u64();
  c.embed_dim = r.u64();
  c.hidden = r.u64();
  c.layers = r.u64();
  c.max_decode_len = r.u64();
  c.attention = static_cast<AttentionMode>(r.u32());
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw SchemaError(std::string("checkpoint config invalid: ") + e.what());
  }
  // Refuse absurd configs before allocating for them.
  constexpr std::uint64_t kMaxEntries = 1ull << 31;
  if (c.hidden > 65536 || c.embed_dim > 65536 || c.layers > 64 ||
      c.src_vocab_size * c.embed_dim > kMaxEntries || c.tgt_vocab_size * c.hidden > kMaxEntries) {
    throw SchemaError("checkpoint config is implausibly large");
  }

  Checkpoint ck{Model(c)};
  ck.format_version = version;
  TrainState& ts = ck.train_state;
  ts.epoch = r.u64();
  ts.best_validation_perplexity = r.f64();
  const std::uint32_t kind = r.u32();
  if (kind > static_cast<std::uint32_t>(OptimizerKind::kAdam)) {
    throw SchemaError("checkpoint names an unknown optimizer");
  }
  auto params = ck.model.params.parameters();
  ts.optimizer = OptimizerState::create(static_cast<OptimizerKind>(kind), params);
  ts.optimizer.step = r.u64();
  ck.rng_seed = r.u64();
  ck.val_split = r.f64();
  ck.src_vocab_crc = r.u32();
  ck.tgt_vocab_crc = r.u32();

  const bool adam = ts.optimizer.kind == OptimizerKind::kAdam;
  const std::uint32_t count = r.u32();
  if (count != params.size() * (adam ? 3 : 1)) {
    throw SchemaError("checkpoint holds " + std::to_string(count) + " tensors, config implies " +
                      std::to_string(params.size() * (adam ? 3 : 1)));
  }
  for (Parameter* p : params) r.tensor_into(p->name, p->value);
  if (adam) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      r.tensor_into("adam.m/" + params[i]->name, ts.optimizer.first_moment[i]);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      r.tensor_into("adam.v/" + params[i]->name, ts.optimizer.second_moment[i]);
    }
  }
  if (!r.at_end()) throw CorruptionError("checkpoint has trailing bytes");
  ck.model.params.shape_audit(c);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace nmt
