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

// Monotonic chunkwise attention (MoChA).
//
// Inference is hard: scan forward from the previously selected frame and stop
// at the first frame whose selection probability reaches 0.5, then softmax
// over a chunk of `chunk_size` frames ending there. Training uses the
// expected-alignment recurrence so everything stays differentiable:
//
//   q[j]    = (1 - p[j-1]) q[j-1] + alpha_prev[j]
//   alpha[j] = p[j] q[j]
//   beta[j]  = sum_{k=j}^{j+w-1} alpha[k] exp(u[j]) / sum_{l=k-w+1}^{k} exp(u[l])

#ifndef OLAS_ATTENTION_H_
#define OLAS_ATTENTION_H_

#include <functional>
#include <span>
#include <vector>

#include "olas/core.h"
#include "olas/encoder.h"

namespace olas {

inline constexpr double kSelectionThreshold = 0.5;

struct AttentionConfig {
  int chunk_size = 3;
  int energy_hidden_dim = 16;
  double selection_bias_init = -1.0;

  void Validate() const;
};

// Additive energies: v^T tanh(W s + V h + b) (+ scalar bias for selection).
struct AttentionParams {
  Matrix sel_w;     // A x S
  Matrix sel_v;     // A x P
  Matrix sel_b;     // A x 1
  Matrix sel_out;   // A x 1
  Matrix sel_bias;  // 1 x 1
  Matrix chunk_w;
  Matrix chunk_v;
  Matrix chunk_b;
  Matrix chunk_out;

  static AttentionParams Zeros(const AttentionConfig& config, int state_dim,
                               int enc_dim);
};

struct AttentionState {
  int prev_index = -1;
};

enum class AttentionStatus { kSelected, kExhausted };

struct AttentionStepResult {
  AttentionStatus status = AttentionStatus::kExhausted;
  int selected_index = -1;
  int peak_index = -1;
  int chunk_start = 0;                // frame index of chunk_weights[0]
  std::vector<double> chunk_weights;  // sums to 1 when selected
  Vector context;
  bool forced = false;                // selection imposed at end of input

  bool selected() const { return status == AttentionStatus::kSelected; }
};

double SelectionEnergy(const AttentionParams& params, const Vector& state,
                       const Vector& frame);
// sigmoid(SelectionEnergy). Throws NumericError on non-finite input.
double SelectionProbability(const AttentionParams& params, const Vector& state,
                            const Vector& frame);
double ChunkEnergy(const AttentionParams& params, const Vector& state,
                   const Vector& frame);

// The hard scan, independent of how probabilities and energies are produced.
// With `force`, an unsuccessful scan over a nonempty buffer selects the last
// frame instead of reporting exhaustion. Does not fill `context`.
AttentionStepResult HardChunkSelect(
    int buffer_len, int prev_index, int chunk_size,
    const std::function<double(int)>& selection_prob,
    const std::function<double(int)>& chunk_energy, bool force);

// Weighted sum of the chunk frames; zero vector of `dim` when not selected.
Vector ChunkContext(const EncodedBuffer& buffer,
                    const AttentionStepResult& result, int dim);

AttentionStepResult MochaInferStep(const Vector& state,
                                   const EncodedBuffer& buffer,
                                   const AttentionState& attention,
                                   const AttentionConfig& config,
                                   const AttentionParams& params,
                                   bool force = false);

struct MochaWeights {
  Vector alpha;  // expected selection distribution (may sum to < 1)
  Vector beta;   // expected chunk attention
  Vector q;      // probability mass still scanning at each frame
  Vector p;      // selection probabilities
};

MochaWeights MochaTrainWeights(std::span<const double> selection_energies,
                               std::span<const double> chunk_energies,
                               int chunk_size, const Vector& alpha_prev);

struct MochaWeightGrads {
  Vector selection_energies;
  Vector chunk_energies;
  Vector alpha_prev;
};

MochaWeightGrads MochaTrainWeightsBackward(
    std::span<const double> chunk_energies, int chunk_size,
    const MochaWeights& weights,
    const Vector& d_alpha, const Vector& d_beta);

}  // namespace olas

#endif  // OLAS_ATTENTION_H_
