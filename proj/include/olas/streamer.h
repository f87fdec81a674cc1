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

// Online decoding with a restricted buffer.
//
// Audio arrives in batches. After each batch the decoder runs only if enough
// encoded frames lie beyond the last attended position, and every step it
// takes is checked: if an attention peak lands in the last `buffer` frames, or
// attention runs out of frames, the step is voided, the beam is restored to
// its last committed state and the session waits for the next batch. The
// buffer size depends on the last emitted token, so silence can be given a
// larger margin than speech. At end of input the checks are lifted and the
// beam is decoded to completion.

#ifndef OLAS_STREAMER_H_
#define OLAS_STREAMER_H_

#include <limits>
#include <vector>

#include "olas/decoder.h"

namespace olas {

// Buffer size meaning "only decode at end of input".
inline constexpr int kUnboundedBufferMs = std::numeric_limits<int>::max();

struct StreamConfig {
  int batch_ms = 320;
  int min_buffer_ms = 960;  // after speech tokens (and at the start)
  int sil_buffer_ms = 960;  // after a silence token

  void Validate() const;
};

int ApplicableBufferMs(int last_token, const StreamConfig& config,
                       const Vocab& vocab);

// What the user would see after a batch: the current best hypothesis with
// non-scoring tokens removed.
struct DisplaySnapshot {
  double clock_ms = 0.0;
  double wall_ms = 0.0;  // compute time spent by the session so far
  std::vector<int> tokens;
};

class StreamSession {
 public:
  StreamSession(ModelPtr model, StreamConfig stream_config,
                BeamConfig beam_config, int frame_shift_ms = 10);

  // Ingests one batch of feature rows. Returns tokens that became stable
  // (common to every hypothesis in the committed beam) during this call.
  // With `is_last`, the session is finalized before returning.
  std::vector<int> Push(const Matrix& frames, bool is_last);

  // Flushes the encoder and decodes to EOS without buffer checks.
  DecodeResult Finalize();

  bool finalized() const { return finalized_; }
  double clock_ms() const { return clock_ms_; }
  double wall_ms() const { return wall_ms_; }
  int backtracks() const { return backtracks_; }
  int restarts() const { return restarts_; }
  int batches() const { return batch_index_; }
  const EncodedBuffer& buffer() const { return buffer_; }
  const std::vector<Hypothesis>& committed_beam() const { return beam_; }

  // Stable output so far, without BOS/EOS.
  std::vector<int> CommittedTokens() const;
  // Volatile best hypothesis so far, without BOS/EOS.
  std::vector<int> CurrentBest() const;

  // One entry per change of the displayed hypothesis.
  const std::vector<DisplaySnapshot>& display_history() const { return display_; }
  const std::vector<nlohmann::json>& trace() const { return trace_; }
  const DecodeResult& result() const;

 private:
  int BufferFrames(int last_token) const;
  void DecodeAvailable();
  void RecordDisplay();

  ModelPtr model_;
  StreamConfig stream_config_;
  BeamConfig beam_config_;
  int frame_shift_ms_;

  EncoderState encoder_state_;
  EncodedBuffer buffer_;
  std::vector<Hypothesis> beam_;        // committed snapshot
  std::vector<int> restart_prefix_;     // tokens of segments closed by restarts
  std::vector<Emission> restart_timeline_;
  double clock_ms_ = 0.0;
  double wall_ms_ = 0.0;
  int batch_index_ = 0;
  int backtracks_ = 0;
  int restarts_ = 0;
  bool finalized_ = false;
  DecodeResult final_;
  std::vector<DisplaySnapshot> display_;
  std::vector<nlohmann::json> trace_;
};

struct OnlineResult {
  DecodeResult result;  // tokens include BOS ... EOS
  std::vector<DisplaySnapshot> display;
  int backtracks = 0;
  int restarts = 0;
  double wall_ms = 0.0;
  double duration_ms = 0.0;
};

// Streams `features` through a session in batch_ms batches.
OnlineResult DecodeOnline(ModelPtr model, const FeatureSequence& features,
                          const StreamConfig& stream_config,
                          const BeamConfig& beam_config);

// DecodeOnline with the restart-on-premature-EOS baseline.
OnlineResult DecodeOnlineRestart(ModelPtr model, const FeatureSequence& features,
                                 const StreamConfig& stream_config,
                                 BeamConfig beam_config);

}  // namespace olas

#endif  // OLAS_STREAMER_H_
