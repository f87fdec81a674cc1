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

// The step-level model interface shared by the trained LAS model and the
// scripted oracle, plus the LAS parameterization itself.

#ifndef OLAS_MODEL_H_
#define OLAS_MODEL_H_

#include <functional>
#include <memory>
#include <random>
#include <string>

#include "olas/attention.h"
#include "olas/core.h"
#include "olas/encoder.h"
#include "olas/gru.h"

namespace olas {

struct DecoderState {
  Vector recurrent;
  Vector context;  // context of the previous step, fed back as input
};

struct StepOutput {
  AttentionStepResult attention;
  DecoderState next;
  Vector log_probs;  // empty unless attention selected a frame
};

// One decoding step of an attention encoder-decoder:
//   s_i = RNN(s_{i-1}, y_{i-1}, c_{i-1}),  c_i = attend(s_i, h),
//   P(y_i | ...) = f(s_i, c_i).
class Model {
 public:
  virtual ~Model() = default;

  virtual const Vocab& vocab() const = 0;
  virtual const Encoder& encoder() const = 0;
  virtual DecoderState InitialState() const = 0;

  // When attention cannot select a frame in `buffer` and `force` is false the
  // result has status kExhausted and no log-probs.
  virtual StepOutput Step(const DecoderState& prev, int prev_token,
                          const EncodedBuffer& buffer,
                          const AttentionState& attention, bool force) const = 0;

  int total_reduction() const { return encoder().config().total_reduction(); }
};

// Shared-ownership handle; decoding never mutates a model.
using ModelPtr = std::shared_ptr<const Model>;

Vector LogSoftmax(const Vector& logits);

struct LasConfig {
  EncoderConfig encoder;
  AttentionConfig attention;
  int decoder_hidden = 32;
  int embedding_dim = 8;

  int context_dim() const { return encoder.projection_dim; }
  void Validate() const;
};

struct DecoderParams {
  Matrix embedding;  // V x E
  GruParams gru;     // input [embedding; context]
};

struct OutputParams {
  Matrix w;  // V x (S + P)
  Matrix b;  // V x 1
};

struct ModelParams {
  EncoderParams encoder;
  AttentionParams attention;
  DecoderParams decoder;
  OutputParams output;

  static ModelParams Zeros(const LasConfig& config, int vocab_size);
  // Scaled uniform initialization, deterministic in `seed`.
  static ModelParams Random(const LasConfig& config, int vocab_size,
                            uint64_t seed);

  // Visits every tensor with a stable name, in a fixed order. Names are
  // prefixed by group: "encoder.", "attention.", "decoder.", "output.".
  void ForEachTensor(const std::function<void(const std::string&, Matrix&)>& fn);
  void ForEachTensor(
      const std::function<void(const std::string&, const Matrix&)>& fn) const;

  int64_t NumParameters() const;
  bool AllFinite() const;
  void SetZero();
  // this += scale * other, tensor by tensor.
  void AddScaled(const ModelParams& other, double scale);
  double SquaredNorm() const;
};

class LasModel : public Model {
 public:
  // Throws InvalidArgument when params disagree with config or vocab.
  LasModel(Vocab vocab, LasConfig config, ModelParams params);

  const Vocab& vocab() const override { return vocab_; }
  const Encoder& encoder() const override { return encoder_; }
  DecoderState InitialState() const override;
  StepOutput Step(const DecoderState& prev, int prev_token,
                  const EncodedBuffer& buffer, const AttentionState& attention,
                  bool force) const override;

  const LasConfig& config() const { return config_; }
  const ModelParams& params() const { return params_; }

 private:
  Vocab vocab_;
  LasConfig config_;
  ModelParams params_;
  Encoder encoder_;
};

// Verifies every tensor of `params` has the shape `Zeros` would produce.
void CheckParamShapes(const ModelParams& params, const LasConfig& config,
                      int vocab_size);

}  // namespace olas

#endif  // OLAS_MODEL_H_
