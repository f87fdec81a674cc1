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

// Asynchronous beam search. Hypotheses advance one token per step against an
// encoded buffer that may still be growing; a hypothesis whose attention runs
// off the end of an incomplete buffer stalls instead of guessing.

#ifndef OLAS_DECODER_H_
#define OLAS_DECODER_H_

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "olas/model.h"

namespace olas {

// What an online decoder does with an EOS while audio is still arriving.
enum class EosPolicy {
  kDefer,    // refuse it and wait for more audio
  kRestart,  // drop it and start a fresh hypothesis where attention stopped
  kAccept,   // finish the hypothesis (the naive baseline)
};

EosPolicy ParseEosPolicy(const std::string& name);
std::string EosPolicyName(EosPolicy policy);

struct BeamConfig {
  int beam_size = 8;
  // Hypotheses may emit at most cap_base + cap_per_frame * T' tokens.
  int cap_base = 8;
  int cap_per_frame = 2;
  EosPolicy eos_policy = EosPolicy::kDefer;

  int MaxTokens(int encoded_frames) const {
    return cap_base + cap_per_frame * encoded_frames;
  }
  void Validate() const;
};

struct Emission {
  int token = -1;
  int selected_index = -1;
  int peak_index = -1;
  double clock_ms = 0.0;
  double log_prob = 0.0;
  bool forced = false;   // attention selection imposed at end of input
  bool runaway = false;  // EOS appended by the token cap
};

struct Hypothesis {
  std::vector<int> tokens;  // begins with BOS
  double log_score = 0.0;
  DecoderState state;
  AttentionState attention;
  bool finished = false;
  bool stalled = false;
  std::vector<Emission> timeline;  // one per token after BOS

  int last_token() const { return tokens.back(); }
  int num_emitted() const { return static_cast<int>(tokens.size()) - 1; }
  bool runaway() const { return !timeline.empty() && timeline.back().runaway; }
};

Hypothesis InitialHypothesis(const Model& model);

struct BeamStep {
  std::vector<Hypothesis> beam;    // sorted by log_score, best first
  std::vector<int> parent;         // index into the input beam
  std::vector<bool> expanded;      // true when the entry gained a token now
  std::vector<AttentionStepResult> attention;  // per input hypothesis
  bool any_exhausted = false;  // some hypothesis needs more input
  int forced_selections = 0;
  int runaways = 0;
};

// Expands every unfinished hypothesis by one token and keeps the best
// `beam_size` candidates. Finished and stalled hypotheses are carried over.
// When `buffer_complete`, exhausted attention falls back to selecting the last
// frame and hypotheses at the token cap are closed with EOS.
BeamStep DecodeStep(const Model& model, const std::vector<Hypothesis>& beam,
                    const EncodedBuffer& buffer, bool buffer_complete,
                    const BeamConfig& config, double clock_ms = 0.0);

struct DecodeResult {
  std::vector<int> tokens;  // best hypothesis, BOS ... EOS
  Hypothesis best;
  std::vector<nlohmann::json> trace;
};

// Runs the beam over a complete buffer until the best hypothesis finishes.
DecodeResult DecodeBuffer(const Model& model, const EncodedBuffer& buffer,
                          const BeamConfig& config, double clock_ms,
                          std::vector<Hypothesis> beam,
                          std::vector<nlohmann::json>* trace);

DecodeResult DecodeOffline(const Model& model, const FeatureSequence& features,
                           const BeamConfig& config);

// JSON record for one emission of a hypothesis.
nlohmann::json EmissionRecord(const Vocab& vocab, const Emission& e, int index,
                              double cumulative_score);
void AppendTimelineTrace(const Vocab& vocab, const Hypothesis& hyp,
                         std::vector<nlohmann::json>* trace);

void WriteJsonLines(const std::vector<nlohmann::json>& records,
                    std::ostream& out);

}  // namespace olas

#endif  // OLAS_DECODER_H_
