// Copyright 2026 The olas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// olas: command line front end.
//
//   olas gen-synthetic  --out DIR [layout flags]
//   olas label-silence  --refs FILE --align FILE --out FILE --duration-frames N
//   olas train          --corpus DIR --out CKPT [--text text.sil]
//   olas decode-offline --corpus DIR (--model CKPT | --oracle aware|skip)
//   olas decode-online  --corpus DIR (--model CKPT | --oracle aware|skip)
//   olas evaluate       --corpus DIR (--model CKPT | --oracle ...) [--offline]
//   olas sweep          --corpus DIR (--model CKPT | --oracle ...) --out CSV
//
// Every verb also reads `--config FILE` (TOML/INI); flags override it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "olas/corpus.h"
#include "olas/evaluate.h"
#include "olas/labeler.h"
#include "olas/synth.h"
#include "olas/trainer.h"

namespace {

using namespace olas;

struct ModelFlags {
  std::string checkpoint;
  std::string oracle;
  int oracle_layers = 2;
  int sil_duration_encoded = 2;
  int blind_frames = 16;

  void Add(CLI::App* app) {
    auto* model = app->add_option("--model", checkpoint, "trained checkpoint");
    auto* oracle_opt =
        app->add_option("--oracle", oracle, "scripted oracle: aware or skip");
    model->excludes(oracle_opt);
    app->add_option("--oracle-layers", oracle_layers, "oracle pyramid depth");
    app->add_option("--sil-duration-encoded", sil_duration_encoded,
                    "oracle: encoded frames per SIL");
    app->add_option("--blind-frames", blind_frames,
                    "oracle: frames a restarted decoder overlooks");
  }

  ModelProvider Provider(const Corpus& corpus) const {
    if (!checkpoint.empty()) {
      Checkpoint ck = LoadCheckpoint(checkpoint);
      return SharedModel(std::make_shared<LasModel>(ck.vocab, ck.config, ck.params));
    }
    if (oracle.empty()) throw InvalidArgument("need --model or --oracle");
    OracleConfig oc;
    oc.mode = ParseOracleMode(oracle);
    oc.num_layers = oracle_layers;
    oc.sil_duration_encoded = sil_duration_encoded;
    oc.restart_blind_frames = blind_frames;
    const int dim = corpus.entries.empty() ? 1 : corpus.entries.front().features.dim();
    return OracleProvider(corpus.vocab, oc, dim);
  }
};

struct DecodeFlags {
  int beam = 8;
  int cap_base = 8;
  int cap_per_frame = 2;
  std::string eos_policy = "defer";
  int batch_ms = 320;
  int min_buffer_ms = 960;
  int sil_buffer_ms = 960;
  int threads = 1;

  void Add(CLI::App* app, bool online) {
    app->add_option("--beam", beam, "beam size");
    app->add_option("--cap-base", cap_base, "token cap constant");
    app->add_option("--cap-per-frame", cap_per_frame, "token cap per encoded frame");
    app->add_option("--threads", threads, "utterances decoded in parallel");
    if (!online) return;
    app->add_option("--eos-policy", eos_policy, "defer, restart or accept");
    app->add_option("--batch-ms", batch_ms, "streaming batch size");
    app->add_option("--min-buffer-ms", min_buffer_ms, "buffer after regular tokens");
    app->add_option("--sil-buffer-ms", sil_buffer_ms, "buffer after silence tokens");
  }

  BeamConfig Beam() const {
    BeamConfig b;
    b.beam_size = beam;
    b.cap_base = cap_base;
    b.cap_per_frame = cap_per_frame;
    b.eos_policy = ParseEosPolicy(eos_policy);
    b.Validate();
    return b;
  }
  StreamConfig Stream() const {
    StreamConfig s;
    s.batch_ms = batch_ms;
    s.min_buffer_ms = min_buffer_ms;
    s.sil_buffer_ms = sil_buffer_ms;
    s.Validate();
    return s;
  }
};

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  return out;
}

void WriteHypotheses(const Corpus& corpus, const EvalSummary& s,
                     const std::string& path) {
  std::vector<ReferenceEntry> hyps;
  for (const auto& u : s.utterances) {
    std::vector<int> body;
    for (int t : u.tokens) {
      if (t != corpus.vocab.bos_id() && t != corpus.vocab.eos_id()) body.push_back(t);
    }
    hyps.push_back({u.utt_id, corpus.vocab.Decode(body)});
  }
  if (path.empty() || path == "-") {
    WriteReferences(hyps, std::cout);
  } else {
    auto out = OpenOut(path);
    WriteReferences(hyps, out);
  }
}

void WriteTraces(const EvalSummary& s, const std::string& path) {
  if (path.empty()) return;
  auto out = OpenOut(path);
  for (const auto& u : s.utterances) {
    for (auto rec : u.trace) {
      rec["utt"] = u.utt_id;
      out << rec.dump() << '\n';
    }
  }
}

int ReportFailures(const EvalSummary& s) {
  for (const auto& u : s.utterances) {
    if (u.failed) std::cerr << "failed: " << u.utt_id << ": " << u.error << '\n';
  }
  return s.failures > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"olas: streaming attention speech recognizer toolkit"};
  app.set_config("--config", "", "TOML/INI configuration file");
  app.require_subcommand(1);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic corpus");
  std::string gen_out;
  SynthConfig synth;
  LayoutSpec layout;
  int gen_count = 100;
  uint64_t gen_seed = 1;
  gen->add_option("--out", gen_out, "corpus directory")->required();
  gen->add_option("--num", gen_count, "number of utterances");
  gen->add_option("--seed", gen_seed, "corpus seed");
  gen->add_option("--num-symbols", synth.num_symbols, "speech tokens");
  gen->add_option("--feature-dim", synth.feature_dim, "feature dimension");
  gen->add_option("--frames-per-token", synth.frames_per_token, "frames per token");
  gen->add_option("--noise", synth.noise_sigma, "feature noise sigma");
  gen->add_option("--pattern-seed", synth.pattern_seed, "token pattern seed");
  gen->add_option("--min-tokens", layout.min_tokens);
  gen->add_option("--max-tokens", layout.max_tokens);
  gen->add_option("--lead-min", layout.lead_min, "leading silence frames (min)");
  gen->add_option("--lead-max", layout.lead_max);
  gen->add_option("--trail-min", layout.trail_min, "trailing silence frames (min)");
  gen->add_option("--trail-max", layout.trail_max);
  gen->add_option("--mid-count-min", layout.mid_count_min, "internal silences (min)");
  gen->add_option("--mid-count-max", layout.mid_count_max);
  gen->add_option("--mid-min", layout.mid_min, "internal silence frames (min)");
  gen->add_option("--mid-max", layout.mid_max);
  gen->add_option("--quantum", layout.quantum, "silence length granularity");

  // label-silence
  auto* label = app.add_subcommand("label-silence", "insert SIL tokens into references");
  std::string label_refs, label_align, label_out;
  LabelerConfig labeler;
  label->add_option("--refs", label_refs, "reference file")->required();
  label->add_option("--align", label_align, "alignment blocks")->required();
  label->add_option("--out", label_out, "labeled reference file")->required();
  label->add_option("--duration-frames", labeler.duration_frames, "frames per SIL");
  label->add_option("--min-segment-frames", labeler.min_segment_frames,
                    "shortest labeled silence (default half the duration)");

  // train
  auto* train = app.add_subcommand("train", "train the LAS model");
  std::string train_corpus, train_text = "text", train_out, train_heldout;
  TrainConfig tc;
  LasConfig las;
  uint64_t init_seed = 7;
  train->add_option("--corpus", train_corpus, "corpus directory")->required();
  train->add_option("--text", train_text, "reference file inside the corpus");
  train->add_option("--heldout", train_heldout, "held-out corpus directory");
  train->add_option("--out", train_out, "final checkpoint")->required();
  train->add_option("--checkpoint-dir", tc.checkpoint_dir, "per-epoch checkpoints");
  train->add_option("--epochs", tc.epochs);
  train->add_option("--batch-size", tc.batch_size);
  train->add_option("--lr", tc.learning_rate);
  train->add_option("--momentum", tc.momentum);
  train->add_option("--clip-norm", tc.clip_norm);
  train->add_option("--label-smoothing", tc.label_smoothing);
  train->add_option("--scheduled-sampling", tc.scheduled_sampling);
  train->add_option("--selection-noise", tc.selection_noise,
                    "noise std. dev. on selection energies");
  train->add_option("--seed", tc.seed, "data order and sampling seed");
  train->add_option("--init-seed", init_seed, "parameter initialization seed");
  train->add_option("--threads", tc.threads);
  train->add_option("--layers", las.encoder.num_layers);
  train->add_option("--encoder-hidden", las.encoder.hidden_units);
  train->add_option("--projection", las.encoder.projection_dim);
  train->add_option("--decoder-hidden", las.decoder_hidden);
  train->add_option("--embedding", las.embedding_dim);
  train->add_option("--attention-hidden", las.attention.energy_hidden_dim);
  train->add_option("--chunk", las.attention.chunk_size);
  train->add_option("--selection-bias", las.attention.selection_bias_init);

  // decode-offline, decode-online, evaluate
  struct DecodeVerb {
    CLI::App* app = nullptr;
    std::string corpus;
    std::string text = "text";
    std::string hyp_out;
    std::string trace_out;
    std::string summary_out;
    bool offline = false;
    bool wall_clock = false;
    ModelFlags model;
    DecodeFlags decode;
  };
  DecodeVerb offline, online, evaluate;
  auto add_decode = [&](DecodeVerb& v, const char* name, const char* help,
                        bool is_online, bool is_eval) {
    v.app = app.add_subcommand(name, help);
    v.app->add_option("--corpus", v.corpus, "corpus directory")->required();
    v.app->add_option("--text", v.text, "reference file inside the corpus");
    v.app->add_option("--hyp", v.hyp_out, "hypothesis output (default stdout)");
    v.app->add_option("--trace", v.trace_out, "JSON-lines trace output");
    v.model.Add(v.app);
    v.decode.Add(v.app, is_online || is_eval);
    if (is_online || is_eval) {
      v.app->add_flag("--wall-clock", v.wall_clock, "add compute time to CPL");
    }
    if (is_eval) {
      v.app->add_flag("--offline", v.offline, "score offline decoding");
      v.app->add_option("--summary", v.summary_out, "CSV summary output");
    }
  };
  add_decode(offline, "decode-offline", "decode whole utterances", false, false);
  add_decode(online, "decode-online", "decode with the streaming buffer scheme", true, false);
  add_decode(evaluate, "evaluate", "decode and report CER and CPL", true, true);
  offline.offline = true;

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid search over beam and buffers");
  std::string sweep_corpus, sweep_text = "text", sweep_out = "-";
  SweepGrid grid;
  ModelFlags sweep_model;
  DecodeFlags sweep_decode;
  bool sweep_wall = false;
  sweep->add_option("--corpus", sweep_corpus, "corpus directory")->required();
  sweep->add_option("--text", sweep_text, "reference file inside the corpus");
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
  sweep->add_option("--beams", grid.beams, "beam sizes")->delimiter(',');
  sweep->add_option("--min-buffers", grid.min_buffer_ms, "min buffers (ms)")->delimiter(',');
  sweep->add_option("--sil-buffers", grid.sil_buffer_ms,
                    "silence buffers (ms); -1 follows the min buffer")->delimiter(',');
  sweep->add_option("--batch-ms", grid.batch_ms, "streaming batch size");
  sweep->add_option("--eos-policy", sweep_decode.eos_policy, "defer, restart or accept");
  sweep->add_option("--cap-base", sweep_decode.cap_base);
  sweep->add_option("--cap-per-frame", sweep_decode.cap_per_frame);
  sweep->add_option("--threads", sweep_decode.threads);
  sweep->add_flag("--wall-clock", sweep_wall, "measure compute time");
  sweep_model.Add(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Corpus corpus = GenCorpus(synth, layout, gen_count, gen_seed);
      WriteCorpus(gen_out, corpus);
      std::cout << nlohmann::json{{"utterances", corpus.entries.size()},
                                  {"vocab", corpus.vocab.size()},
                                  {"out", gen_out}}.dump()
                << '\n';
      return 0;
    }
    if (label->parsed()) {
      std::ifstream rin(label_refs), ain(label_align);
      if (!rin) throw InvalidArgument("cannot open " + label_refs);
      if (!ain) throw InvalidArgument("cannot open " + label_align);
      LabelStats stats;
      auto labeled = LabelCorpus(ReadReferences(rin), ReadAlignmentBlocks(ain),
                                 labeler, &stats);
      auto out = OpenOut(label_out);
      WriteReferences(labeled, out);
      std::cout << nlohmann::json{{"utterances", stats.utterances},
                                  {"changed", stats.changed},
                                  {"sil_inserted", stats.sil_inserted},
                                  {"segments_labeled", stats.segments_labeled},
                                  {"segments_skipped", stats.segments_skipped}}.dump()
                << '\n';
      return 0;
    }
    if (train->parsed()) {
      Corpus corpus = ReadCorpus(train_corpus, train_text);
      auto to_examples = [](const Corpus& c) {
        std::vector<TrainExample> out;
        for (const auto& e : c.entries) {
          std::vector<int> target = {c.vocab.bos_id()};
          for (int id : c.vocab.Encode(e.tokens)) target.push_back(id);
          target.push_back(c.vocab.eos_id());
          out.push_back({e.utt_id, e.features.frames, std::move(target)});
        }
        return out;
      };
      if (corpus.entries.empty()) throw InvalidArgument("training corpus is empty");
      las.encoder.input_dim = corpus.entries.front().features.dim();
      std::vector<TrainExample> heldout;
      if (!train_heldout.empty()) heldout = to_examples(ReadCorpus(train_heldout, train_text));
      ModelParams init = ModelParams::Random(las, corpus.vocab.size(), init_seed);
      TrainResult r = Train(std::move(init), las, corpus.vocab, to_examples(corpus),
                            heldout, tc);
      for (const auto& e : r.log) {
        nlohmann::json j = {{"epoch", e.epoch}, {"train_loss", e.train_loss},
                            {"grad_norm", e.grad_norm}};
        if (e.heldout_loss) j["heldout_loss"] = *e.heldout_loss;
        std::cout << j.dump() << '\n';
      }
      Checkpoint ck{corpus.vocab, las, std::move(r.params), nlohmann::json::object()};
      ck.meta["epochs"] = tc.epochs;
      SaveCheckpoint(ck, train_out);
      return 0;
    }
    for (DecodeVerb* v : {&offline, &online, &evaluate}) {
      if (!v->app->parsed()) continue;
      Corpus corpus = ReadCorpus(v->corpus, v->text);
      EvalOptions options;
      options.mode = v->offline ? DecodeMode::kOffline : DecodeMode::kOnline;
      options.beam = v->decode.Beam();
      if (!v->offline) options.stream = v->decode.Stream();
      options.wall_clock = v->wall_clock;
      options.threads = v->decode.threads;
      EvalSummary s = EvaluateCorpus(corpus, v->model.Provider(corpus), options);
      if (v != &evaluate || !v->hyp_out.empty()) WriteHypotheses(corpus, s, v->hyp_out);
      WriteTraces(s, v->trace_out);
      if (v == &evaluate) {
        SweepRow row;
        row.beam = options.beam.beam_size;
        row.min_buffer_ms = v->offline ? 0 : options.stream.min_buffer_ms;
        row.sil_buffer_ms = v->offline ? 0 : options.stream.sil_buffer_ms;
        row.batch_ms = v->offline ? 0 : options.stream.batch_ms;
        row.summary = s;
        if (!v->wall_clock) row.summary.wall_ms = 0.0;
        row.failed = s.failures > 0;
        if (v->summary_out.empty()) {
          WriteSweepCsv({row}, std::cout);
        } else {
          auto out = OpenOut(v->summary_out);
          WriteSweepCsv({row}, out);
        }
      }
      return ReportFailures(s);
    }
    if (sweep->parsed()) {
      Corpus corpus = ReadCorpus(sweep_corpus, sweep_text);
      BeamConfig base = sweep_decode.Beam();
      auto rows = RunSweep(corpus, sweep_model.Provider(corpus), grid, base,
                           sweep_wall, sweep_decode.threads);
      if (sweep_out == "-") {
        WriteSweepCsv(rows, std::cout);
      } else {
        auto out = OpenOut(sweep_out);
        WriteSweepCsv(rows, out);
      }
      int failed = 0;
      for (const auto& r : rows) {
        if (!r.failed) continue;
        ++failed;
        std::cerr << "failed grid point beam=" << r.beam << " min=" << r.min_buffer_ms
                  << " sil=" << r.sil_buffer_ms << ": " << r.error << '\n';
      }
      return failed > 0 ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "olas: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
