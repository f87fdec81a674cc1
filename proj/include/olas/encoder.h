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

// Pyramidal recurrent encoder. Every layer consumes adjacent pairs of its
// input sequence, so K layers reduce the frame rate by 2^K. The streaming
// path (Push/Finish) produces exactly the frames the one-shot path would.

#ifndef OLAS_ENCODER_H_
#define OLAS_ENCODER_H_

#include <optional>
#include <vector>

#include "olas/core.h"
#include "olas/gru.h"

namespace olas {

inline constexpr int kPyramidReduction = 2;

struct EncoderConfig {
  int num_layers = 2;
  int input_dim = 8;
  int hidden_units = 32;
  int projection_dim = 16;

  int total_reduction() const;
  int LayerInputDim(int layer) const;
  void Validate() const;  // InvalidArgument on non-positive sizes
};

struct EncoderLayerParams {
  GruParams gru;
  Matrix proj;    // P x H
  Matrix proj_b;  // P x 1
};

struct EncoderParams {
  std::vector<EncoderLayerParams> layers;

  static EncoderParams Zeros(const EncoderConfig& config);
};

// Streaming state for one utterance.
struct EncoderState {
  std::vector<Vector> hidden;                  // per layer recurrent state
  std::vector<std::optional<Vector>> pending;  // per layer unpaired frame
  int64_t frames_consumed = 0;
  int64_t frames_emitted = 0;
  bool finished = false;
};

// Encoded frames h_1..T' accumulated during a session. Append-only.
class EncodedBuffer {
 public:
  EncodedBuffer() = default;
  EncodedBuffer(int total_reduction, int frame_shift_ms)
      : total_reduction_(total_reduction), frame_shift_ms_(frame_shift_ms) {}

  void Append(std::vector<Vector> frames);
  int size() const { return static_cast<int>(frames_.size()); }
  bool empty() const { return frames_.empty(); }
  const Vector& operator[](int t) const { return frames_[t]; }
  const std::vector<Vector>& frames() const { return frames_; }
  int total_reduction() const { return total_reduction_; }
  int frame_shift_ms() const { return frame_shift_ms_; }
  // Audio duration covered by one encoded frame.
  int encoded_frame_ms() const { return total_reduction_ * frame_shift_ms_; }

 private:
  std::vector<Vector> frames_;
  int total_reduction_ = 1;
  int frame_shift_ms_ = 10;
};

class Encoder {
 public:
  // Throws InvalidArgument if params are not shaped per config.
  Encoder(EncoderConfig config, EncoderParams params);

  const EncoderConfig& config() const { return config_; }
  const EncoderParams& params() const { return params_; }

  EncoderState Reset() const;

  // Feeds feature rows; returns the newly completed top-layer frames.
  std::vector<Vector> Push(EncoderState& state, const Matrix& frames) const;

  // Completes odd leftovers by duplicating the last frame of each layer,
  // bottom-up, and returns whatever that flushes out of the top layer.
  std::vector<Vector> Finish(EncoderState& state) const;

  // One-shot encoding of a whole utterance, computed layer by layer.
  std::vector<Vector> EncodeOffline(const Matrix& frames) const;

 private:
  Vector RunLayer(int layer, const Vector& pair, Vector& hidden) const;
  void Feed(EncoderState& state, int layer, const Vector& frame,
            std::vector<Vector>& out) const;

  EncoderConfig config_;
  EncoderParams params_;
};

// Training-time record of a one-shot encode, enough to backpropagate.
struct EncoderTrace {
  struct Layer {
    std::vector<int> source;  // index into previous sequence for each slot
    std::vector<GruCache> cells;
    std::vector<Vector> hidden;
  };
  std::vector<Layer> layers;
  std::vector<std::vector<Vector>> outputs;  // per layer outputs
  int input_frames = 0;
};

std::vector<Vector> EncoderForward(const EncoderParams& params,
                                   const EncoderConfig& config,
                                   const Matrix& frames, EncoderTrace* trace);

// d_outputs are gradients w.r.t. top-layer frames. Accumulates into grad.
void EncoderBackward(const EncoderParams& params, const EncoderConfig& config,
                     const EncoderTrace& trace,
                     const std::vector<Vector>& d_outputs,
                     EncoderParams* grad);

}  // namespace olas

#endif  // OLAS_ENCODER_H_
