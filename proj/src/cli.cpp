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

#include "nmt/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "nmt/checkpoint.hpp"
#include "nmt/corpus.hpp"
#include "nmt/decoder.hpp"
#include "nmt/error.hpp"
#include "nmt/io_util.hpp"
#include "nmt/kernels.hpp"
#include "nmt/metrics.hpp"
#include "nmt/random.hpp"
#include "nmt/trainer.hpp"
#include "nmt/vocab.hpp"

namespace nmt {
namespace {

namespace fs = std::filesystem;

// Stream id for the train/validation split shuffle, distinct from the
// per-epoch batch shuffles (which use the epoch number).
constexpr std::uint64_t kSplitStream = 0xfffffffful;

struct BuildVocabArgs {
  std::string src, tgt, out_dir;
  std::size_t max_size = 15000;
  std::size_t min_freq = 1;
};

struct TrainArgs {
  std::string src, tgt, src_vocab, tgt_vocab, out, resume;
  std::size_t epochs = 10, batch_size = 32, checkpoint_every = 1;
  double lr = 0.001, clip = 5.0, val_split = 0.1;
  std::uint64_t seed = 1;
  std::size_t embed = 128, hidden = 128, layers = 2, max_len = 50;
  std::string optimizer = "adam";
  std::string attention = "dot";
};

struct TranslateArgs {
  std::string model, src_vocab, tgt_vocab, dump_attention;
  std::size_t beam = 5;
  double alpha = 0.0;
  std::size_t max_len = 0;
};

struct EvaluateArgs {
  std::string model, src, ref, src_vocab, tgt_vocab, report;
  std::size_t beam = 5;
  double alpha = 0.0;
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kIo: return kExitIo;
    default: return kExitData;
  }
}

struct LoadedModel {
  Checkpoint ckpt;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
};

// Loads a checkpoint and the vocabularies it was trained with.
LoadedModel load_model(const std::string& model_path, const std::string& src_vocab_path,
                       const std::string& tgt_vocab_path) {
  const std::string src_text = read_file(src_vocab_path);
  const std::string tgt_text = read_file(tgt_vocab_path);
  LoadedModel m{load_checkpoint(model_path), Vocabulary::parse(src_text),
                Vocabulary::parse(tgt_text)};
  const ModelConfig& c = m.ckpt.model.config;
  if (c.src_vocab_size != m.src_vocab.size() || c.tgt_vocab_size != m.tgt_vocab.size()) {
    throw SchemaError(fmt::format(
        "vocabulary sizes {}/{} do not match the model's {}/{}", m.src_vocab.size(),
        m.tgt_vocab.size(), c.src_vocab_size, c.tgt_vocab_size));
  }
  if (m.ckpt.src_vocab_crc != crc32_of(src_text) || m.ckpt.tgt_vocab_crc != crc32_of(tgt_text)) {
    throw SchemaError("vocabulary files differ from the ones the model was trained with");
  }
  return m;
}

AttentionMode parse_attention(const std::string& s) {
  if (s == "dot") return AttentionMode::kDot;
  if (s == "uniform") return AttentionMode::kUniform;
  throw UsageError("--attention must be 'dot' or 'uniform'");
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "sgd") return OptimizerKind::kSgd;
  throw UsageError("--optimizer must be 'adam' or 'sgd'");
}

int run_build_vocab(const BuildVocabArgs& a, std::ostream& out) {
  if (a.max_size < kNumSpecials + 1) throw UsageError("--max-size must be >= 5");
  if (a.min_freq < 1) throw UsageError("--min-freq must be >= 1");
  const ParallelCorpus corpus = load_parallel_corpus(a.src, a.tgt);
  std::vector<std::vector<std::string>> src, tgt;
  for (const auto& p : corpus.pairs) {
    src.push_back(p.source);
    tgt.push_back(p.target);
  }
  const Vocabulary sv = build_vocab(src, a.max_size, a.min_freq);
  const Vocabulary tv = build_vocab(tgt, a.max_size, a.min_freq);
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + a.out_dir + "'");
  sv.save(fs::path(a.out_dir) / "src.vocab");
  tv.save(fs::path(a.out_dir) / "tgt.vocab");
  out << fmt::format("pairs={} dropped={} src_vocab={} tgt_vocab={}\n", corpus.pairs.size(),
                     corpus.dropped_count, sv.size(), tv.size());
  return kExitOk;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  const std::string src_text = read_file(a.src_vocab);
  const std::string tgt_text = read_file(a.tgt_vocab);
  const Vocabulary sv = Vocabulary::parse(src_text);
  const Vocabulary tv = Vocabulary::parse(tgt_text);
  const ParallelCorpus corpus = load_parallel_corpus(a.src, a.tgt);
  if (corpus.pairs.empty()) throw ContractError("training corpus has no usable pairs");
  const auto encoded = encode_corpus(corpus.pairs, sv, tv);

  TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch_size;
  tc.learning_rate = a.lr;
  tc.clip_norm = a.clip;
  tc.seed = a.seed;
  tc.checkpoint_every = a.checkpoint_every;
  tc.optimizer = parse_optimizer(a.optimizer);

  CheckpointSink sink{a.out, a.seed, a.val_split, crc32_of(src_text), crc32_of(tgt_text)};
  std::optional<Checkpoint> resumed;
  if (!a.resume.empty()) {
    resumed.emplace(load_checkpoint(a.resume));
    if (resumed->src_vocab_crc != sink.src_vocab_crc || resumed->tgt_vocab_crc != sink.tgt_vocab_crc) {
      throw SchemaError("--resume checkpoint was trained with different vocabularies");
    }
    if (resumed->train_state.optimizer.kind != tc.optimizer) {
      throw SchemaError("--resume checkpoint uses a different optimizer");
    }
    // The split and shuffles must continue the original run.
    sink.split_seed = resumed->rng_seed;
    sink.val_split = resumed->val_split;
    tc.seed = resumed->rng_seed;
  }
  if (!(sink.val_split >= 0.0 && sink.val_split < 1.0)) throw UsageError("--val-split must be in [0, 1)");

  const Split split = split_corpus(encoded, sink.val_split, derive_seed(tc.seed, kSplitStream));
  if (split.train.empty()) throw ContractError("validation split leaves no training pairs");

  Model model = resumed ? resumed->model : [&] {
    ModelConfig mc;
    mc.src_vocab_size = sv.size();
    mc.tgt_vocab_size = tv.size();
    mc.embed_dim = a.embed;
    mc.hidden = a.hidden;
    mc.layers = a.layers;
    mc.max_decode_len = a.max_len;
    mc.attention = parse_attention(a.attention);
    return Model::initialized(mc, tc.seed);
  }();
  if (model.config.src_vocab_size != sv.size() || model.config.tgt_vocab_size != tv.size()) {
    throw SchemaError("vocabulary sizes do not match the resumed model");
  }
  TrainState state = resumed ? resumed->train_state : TrainState::fresh(tc.optimizer, model);

  const TrainingLog log = train(model, state, split.train, split.validation, tc, sink);
  for (const auto& rec : log.epochs) out << format_log_line(rec) << '\n';
  out << fmt::format("trained pairs={} validation={} dropped={} steps={}\n", split.train.size(),
                     split.validation.size(), corpus.dropped_count, state.optimizer.step);
  return kExitOk;
}

DecodeConfig decode_config_for(const Model& model, std::size_t beam, double alpha,
                               std::size_t max_len) {
  if (beam < 1) throw UsageError("--beam must be >= 1");
  DecodeConfig dc = default_decode_config(model);
  dc.beam_width = beam;
  dc.length_penalty_alpha = alpha;
  if (max_len > 0) dc.max_decode_len = max_len;
  return dc;
}

int run_translate(const TranslateArgs& a, std::istream& in, std::ostream& out) {
  const LoadedModel m = load_model(a.model, a.src_vocab, a.tgt_vocab);
  const Model& model = m.ckpt.model;
  const DecodeConfig dc = decode_config_for(model, a.beam, a.alpha, a.max_len);

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }

  std::vector<std::optional<Translation>> results(lines.size());
  std::vector<std::string> errors(lines.size());
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = translate(lines[i], m.src_vocab, m.tgt_vocab, model, dc);
    } catch (const EmptyInputError&) {
      // Blank input lines map to blank output lines.
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw ContractError(fmt::format("line {}: {}", i + 1, errors[i]));
    }
  }

  std::ofstream dump;
  if (!a.dump_attention.empty()) {
    dump.open(a.dump_attention, std::ios::binary | std::ios::trunc);
    if (!dump) throw IoError("cannot open '" + a.dump_attention + "' for writing");
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << (results[i] ? results[i]->text : std::string()) << '\n';
    if (dump.is_open()) {
      if (i) dump << '\n';
      if (results[i]) write_attention(dump, *results[i], m.tgt_vocab);
    }
  }
  if (dump.is_open() && !dump) throw IoError("write failed for '" + a.dump_attention + "'");
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const LoadedModel m = load_model(a.model, a.src_vocab, a.tgt_vocab);
  const Model& model = m.ckpt.model;
  const DecodeConfig dc = decode_config_for(model, a.beam, a.alpha, 0);
  const ParallelCorpus corpus = load_parallel_corpus(a.src, a.ref);
  if (corpus.pairs.empty()) throw ContractError("evaluation corpus has no usable pairs");
  const MetricReport report = evaluate(model, corpus.pairs, m.src_vocab, m.tgt_vocab, dc);
  const std::string text = format_report(report);
  write_file_atomic(a.report, text);
  out << text;
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Attention-based LSTM encoder-decoder translation toolkit", "attn-nmt"};
  app.require_subcommand(1);

  BuildVocabArgs bv;
  auto* build = app.add_subcommand("build-vocab", "Build source and target vocabularies");
  build->add_option("--src", bv.src, "Source-side corpus file")->required();
  build->add_option("--tgt", bv.tgt, "Target-side corpus file")->required();
  build->add_option("--out-dir", bv.out_dir, "Directory for src.vocab and tgt.vocab")->required();
  build->add_option("--max-size", bv.max_size, "Maximum entries per vocabulary");
  build->add_option("--min-freq", bv.min_freq, "Minimum token frequency");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a model");
  tr->add_option("--src", ta.src)->required();
  tr->add_option("--tgt", ta.tgt)->required();
  tr->add_option("--src-vocab", ta.src_vocab)->required();
  tr->add_option("--tgt-vocab", ta.tgt_vocab)->required();
  tr->add_option("--out", ta.out, "Output directory for checkpoints and train.log")->required();
  tr->add_option("--epochs", ta.epochs);
  tr->add_option("--batch-size", ta.batch_size);
  tr->add_option("--lr", ta.lr);
  tr->add_option("--seed", ta.seed);
  tr->add_option("--val-split", ta.val_split);
  tr->add_option("--resume", ta.resume, "Checkpoint to continue from");
  tr->add_option("--clip", ta.clip, "Global gradient-norm clip");
  tr->add_option("--optimizer", ta.optimizer, "adam or sgd");
  tr->add_option("--checkpoint-every", ta.checkpoint_every);
  tr->add_option("--embed", ta.embed);
  tr->add_option("--hidden", ta.hidden);
  tr->add_option("--layers", ta.layers);
  tr->add_option("--max-len", ta.max_len, "Decode length cap stored in the model");
  tr->add_option("--attention", ta.attention, "dot or uniform");

  TranslateArgs tl;
  auto* trn = app.add_subcommand("translate", "Translate stdin to stdout, one sentence per line");
  trn->add_option("--model", tl.model)->required();
  trn->add_option("--src-vocab", tl.src_vocab)->required();
  trn->add_option("--tgt-vocab", tl.tgt_vocab)->required();
  trn->add_option("--beam", tl.beam);
  trn->add_option("--alpha", tl.alpha, "Length-penalty exponent");
  trn->add_option("--max-len", tl.max_len);
  trn->add_option("--dump-attention", tl.dump_attention);

  EvaluateArgs ev;
  auto* eva = app.add_subcommand("evaluate", "Score a model on a parallel test set");
  eva->add_option("--model", ev.model)->required();
  eva->add_option("--src", ev.src)->required();
  eva->add_option("--ref", ev.ref)->required();
  eva->add_option("--src-vocab", ev.src_vocab)->required();
  eva->add_option("--tgt-vocab", ev.tgt_vocab)->required();
  eva->add_option("--beam", ev.beam);
  eva->add_option("--alpha", ev.alpha);
  eva->add_option("--report", ev.report)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "attn-nmt: " << e.what() << "\n" << "run 'attn-nmt --help' for usage\n";
    return kExitUsage;
  }

  try {
    kernels::configure_threads_from_env();
    if (build->parsed()) return run_build_vocab(bv, out);
    if (tr->parsed()) return run_train(ta, out);
    if (trn->parsed()) return run_translate(tl, in, out);
    return run_evaluate(ev, out);
  } catch (const Error& e) {
    err << "attn-nmt: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "attn-nmt: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace nmt
