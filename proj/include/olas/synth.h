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

// Synthetic utterances and a scripted model that knows where they came from.
//
// Each token is a fixed D-dimensional pattern held for `frames_per_token`
// frames; silence is zero. The oracle reads the generator's alignment rather
// than the acoustics, so its decisions are exact and can be asserted.

#ifndef OLAS_SYNTH_H_
#define OLAS_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "olas/corpus.h"
#include "olas/model.h"

namespace olas {

struct SynthConfig {
  int num_symbols = 8;  // speech tokens "a", "b", ...
  int feature_dim = 8;
  int frames_per_token = 8;
  double noise_sigma = 0.0;
  double min_pattern_distance = 1.0;
  uint64_t pattern_seed = 17;
  int frame_shift_ms = 10;

  void Validate() const;
};

// Speech symbols named by letter, then "s<k>" beyond 26.
std::vector<std::string> SynthSymbols(int count);
Vocab SynthVocab(const SynthConfig& config);

// num_symbols x D pattern table; rows are pairwise at least
// min_pattern_distance apart and that far from the silence vector.
Matrix SynthPatterns(const SynthConfig& config);

struct SilenceSpan {
  int position = 0;  // silence goes before token `position`
  int frames = 0;
};

struct SyntheticUtterance {
  FeatureSequence features;
  std::vector<std::string> tokens;
  Alignment alignment;
};

// Spans at the same position are merged. Throws InvalidArgument for unknown
// tokens, positions outside [0, tokens.size()] or an empty request.
SyntheticUtterance GenUtterance(const SynthConfig& config, const Matrix& patterns,
                                uint64_t seed,
                                const std::vector<std::string>& tokens,
                                const std::vector<SilenceSpan>& layout);

// Random layout distribution for corpus generation. Silence lengths are
// drawn uniformly in frames and rounded down to multiples of `quantum`.
struct LayoutSpec {
  int min_tokens = 2;
  int max_tokens = 5;
  int lead_min = 0, lead_max = 0;
  int trail_min = 0, trail_max = 0;
  int mid_count_min = 0, mid_count_max = 1;
  int mid_min = 0, mid_max = 0;
  int quantum = 1;

  void Validate() const;
};

Corpus GenCorpus(const SynthConfig& config, const LayoutSpec& layout,
                 int num_utterances, uint64_t seed,
                 const std::string& id_prefix = "syn");

enum class OracleMode { kSilenceSkipping, kSilenceAware };

OracleMode ParseOracleMode(const std::string& name);

struct OracleConfig {
  OracleMode mode = OracleMode::kSilenceAware;
  int num_layers = 2;           // pyramid depth of the encoder it pretends to use
  int chunk_size = 3;
  int sil_duration_encoded = 2;   // encoded frames per SIL
  int min_silence_encoded = -1;   // negative means sil_duration_encoded / 2
  // A decoder restarted at frame p does not notice speech that starts at or
  // before p + restart_blind_frames (silence-skipping mode only).
  int restart_blind_frames = 16;
  double floor_prob = 1e-4;

  int MinSilenceEncoded() const {
    return min_silence_encoded < 0 ? sil_duration_encoded / 2 : min_silence_encoded;
  }
  void Validate() const;
};

// Scripted model bound to one synthetic utterance. Decoding any buffer that
// is longer than the utterance's encoding throws UnsupportedInput.
class OracleModel : public Model {
 public:
  OracleModel(Vocab vocab, OracleConfig config, int feature_dim,
              const Alignment& alignment);

  const Vocab& vocab() const override { return vocab_; }
  const Encoder& encoder() const override { return encoder_; }
  DecoderState InitialState() const override;
  StepOutput Step(const DecoderState& prev, int prev_token,
                  const EncodedBuffer& buffer, const AttentionState& attention,
                  bool force) const override;

  int num_encoded_frames() const { return static_cast<int>(segment_of_.size()); }
  // Frames at which a token is emitted, in order, and the tokens themselves.
  const std::vector<int>& emission_frames() const { return emission_frames_; }
  const std::vector<int>& emission_tokens() const { return emission_tokens_; }

 private:
  int Target(int prev_index, int buffer_len, int emitted, bool fresh) const;

  Vocab vocab_;
  OracleConfig config_;
  Encoder encoder_;
  std::vector<int> segment_of_;        // per encoded frame
  std::vector<int> segment_start_;     // per segment, in encoded frames
  std::vector<bool> segment_speech_;   // per segment
  std::vector<int> emission_frames_;
  std::vector<int> emission_tokens_;
  std::vector<int> token_at_;          // per encoded frame, -1 if none
};

}  // namespace olas

#endif  // OLAS_SYNTH_H_
