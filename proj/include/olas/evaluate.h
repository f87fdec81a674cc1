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

// Corpus-level decoding and scoring, and buffer/beam grid sweeps.

#ifndef OLAS_EVALUATE_H_
#define OLAS_EVALUATE_H_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "olas/corpus.h"
#include "olas/metrics.h"
#include "olas/streamer.h"
#include "olas/synth.h"

namespace olas {

// Supplies the model for an utterance. Scripted oracles are bound to one
// utterance; trained models ignore the argument.
using ModelProvider = std::function<ModelPtr(const CorpusEntry&)>;

ModelProvider SharedModel(ModelPtr model);
// Throws UnsupportedInput for entries without an alignment.
ModelProvider OracleProvider(Vocab vocab, OracleConfig config, int feature_dim);

enum class DecodeMode { kOffline, kOnline };

struct EvalOptions {
  DecodeMode mode = DecodeMode::kOnline;
  BeamConfig beam;
  StreamConfig stream;
  bool wall_clock = false;
  int threads = 1;
};

struct UttResult {
  std::string utt_id;
  std::vector<int> tokens;  // BOS ... EOS
  CerReport cer;
  CplRecord cpl;
  int backtracks = 0;
  int restarts = 0;
  double wall_ms = 0.0;
  std::vector<nlohmann::json> trace;
  bool failed = false;
  std::string error;
};

struct EvalSummary {
  CerReport cer;
  double avg_cpl_ms = 0.0;
  int undefined_cpl = 0;
  int backtracks = 0;
  int restarts = 0;
  double wall_ms = 0.0;
  int failures = 0;
  std::vector<UttResult> utterances;
};

// References are the entries' tokens; CPL needs alignments and is left
// undefined without one.
EvalSummary EvaluateCorpus(const Corpus& corpus, const ModelProvider& provider,
                           const EvalOptions& options);

// Sil buffer value meaning "same as the min buffer of this grid point".
inline constexpr int kSilBufferFollowsMin = -1;

struct SweepGrid {
  std::vector<int> beams = {8};
  std::vector<int> min_buffer_ms = {960};
  std::vector<int> sil_buffer_ms = {960};
  int batch_ms = 320;
};

struct SweepRow {
  int beam = 0;
  int min_buffer_ms = 0;
  int sil_buffer_ms = 0;
  int batch_ms = 0;
  EvalSummary summary;
  bool failed = false;
  std::string error;
};

// Rows in grid order: beam outermost, then min buffer, then sil buffer.
std::vector<SweepRow> RunSweep(const Corpus& corpus, const ModelProvider& provider,
                               const SweepGrid& grid, const BeamConfig& base,
                               bool wall_clock, int threads);

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace olas

#endif  // OLAS_EVALUATE_H_
