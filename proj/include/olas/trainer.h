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

// Training of the LAS model with soft (expected) MoChA alignments:
// label-smoothed cross entropy, scheduled sampling, hand-written backward
// pass and plain momentum SGD.

#ifndef OLAS_TRAINER_H_
#define OLAS_TRAINER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "olas/model.h"

namespace olas {

enum class Reduction { kMean, kSum };

struct TrainConfig {
  double label_smoothing = 0.2;
  double scheduled_sampling = 0.2;
  // Std. dev. of Gaussian noise added to selection energies while training.
  double selection_noise = 0.0;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables
  int epochs = 30;
  int batch_size = 8;
  uint64_t seed = 1;
  Reduction reduction = Reduction::kMean;
  int threads = 1;
  std::string checkpoint_dir;  // empty disables per-epoch checkpoints

  void Validate() const;
};

// Target distribution for one step: (1 - eps) one-hot + eps / V.
Vector SmoothedTarget(int label, int vocab_size, double epsilon);

struct LossOptions {
  double label_smoothing = 0.0;
  double scheduled_sampling = 0.0;
  double selection_noise = 0.0;
};

// Everything the backward pass needs from one forward pass.
class ForwardCache {
 public:
  bool valid() const { return valid_; }

 private:
  friend double ForwardLoss(const ModelParams&, const LasConfig&, const Matrix&,
                            const std::vector<int>&, const LossOptions&,
                            std::mt19937_64*, ForwardCache*);
  friend void Backward(const ModelParams&, const LasConfig&, ForwardCache*,
                       ModelParams*, double);

  struct StepCache {
    int input_token = 0;
    GruCache gru;
    Vector state;
    MochaWeights weights;
    std::vector<double> chunk_energies;
    Matrix sel_act;    // tanh activations, A x T'
    Matrix chunk_act;  // A x T'
    Vector context;
    Vector dlogits;    // softmax - target, unscaled
  };

  bool valid_ = false;
  uint64_t fingerprint_ = 0;
  EncoderTrace encoder;
  Matrix enc;  // P x T'
  std::vector<StepCache> steps;
};

// Mean over decoding steps of the cross entropy against smoothed targets.
// `target` is BOS ... EOS. With scheduled sampling > 0, `rng` must be set:
// each step after the first feeds back a token sampled from the previous
// step's output distribution with that probability.
double ForwardLoss(const ModelParams& params, const LasConfig& config,
                   const Matrix& frames, const std::vector<int>& target,
                   const LossOptions& options, std::mt19937_64* rng,
                   ForwardCache* cache);

// Adds scale * dLoss/dparams to `grad` and invalidates the cache. Throws
// StateError if the cache is invalid or `params` changed since the forward.
void Backward(const ModelParams& params, const LasConfig& config,
              ForwardCache* cache, ModelParams* grad, double scale = 1.0);

struct TrainExample {
  std::string utt_id;
  Matrix frames;
  std::vector<int> target;  // BOS ... EOS
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> heldout_loss;
  double grad_norm = 0.0;  // mean pre-clipping norm over updates
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

// Loss and gradient of a batch under `config.reduction`, computed
// data-parallel with a fixed reduction order.
double BatchGradient(const ModelParams& params, const LasConfig& las,
                     const std::vector<const TrainExample*>& batch,
                     const LossOptions& options, uint64_t seed, int epoch,
                     const std::vector<int>& example_ids, Reduction reduction,
                     int threads, ModelParams* grad);

// Mean per-utterance loss without scheduled sampling.
double EvaluateLoss(const ModelParams& params, const LasConfig& config,
                    const std::vector<TrainExample>& examples,
                    double label_smoothing);

// Throws NumericError on divergence; the checkpoint of the last good epoch
// (if checkpointing is on) is left in place.
TrainResult Train(ModelParams params, const LasConfig& config, const Vocab& vocab,
                  const std::vector<TrainExample>& train,
                  const std::vector<TrainExample>& heldout,
                  const TrainConfig& train_config);

struct Checkpoint {
  Vocab vocab;
  LasConfig config;
  ModelParams params;
  nlohmann::json meta = nlohmann::json::object();
};

nlohmann::json LasConfigToJson(const LasConfig& config);
LasConfig LasConfigFromJson(const nlohmann::json& j);

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);
std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint ParseCheckpoint(const std::string& text);

// Content hash used for checkpoints and stale-cache detection.
uint64_t Fnv1a(std::string_view bytes, uint64_t seed = 14695981039346656037ull);
uint64_t ParamsFingerprint(const ModelParams& params);

struct GradCheckResult {
  std::string tensor;
  double max_rel_error = 0.0;
  int checked = 0;
};

// Central finite differences on every element (or at most `max_per_tensor`
// evenly spaced elements) of every tensor. Relative error per element is
// |analytic - numeric| / max(|analytic|, |numeric|, floor).
std::vector<GradCheckResult> GradientCheck(const ModelParams& params,
                                           const LasConfig& config,
                                           const Matrix& frames,
                                           const std::vector<int>& target,
                                           double label_smoothing, double step,
                                           int max_per_tensor = 0,
                                           double floor = 1e-6);

}  // namespace olas

#endif  // OLAS_TRAINER_H_
