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

#include "olas/attention.h"

#include <algorithm>
#include <cmath>

#include "olas/gru.h"

namespace olas {

void AttentionConfig::Validate() const {
  if (chunk_size < 1) throw InvalidArgument("chunk_size must be >= 1");
  if (energy_hidden_dim <= 0) throw InvalidArgument("energy_hidden_dim must be positive");
}

AttentionParams AttentionParams::Zeros(const AttentionConfig& config,
                                       int state_dim, int enc_dim) {
  config.Validate();
  const int a = config.energy_hidden_dim;
  AttentionParams p;
  p.sel_w = Matrix::Zero(a, state_dim);
  p.sel_v = Matrix::Zero(a, enc_dim);
  p.sel_b = Matrix::Zero(a, 1);
  p.sel_out = Matrix::Zero(a, 1);
  p.sel_bias = Matrix::Zero(1, 1);
  p.chunk_w = Matrix::Zero(a, state_dim);
  p.chunk_v = Matrix::Zero(a, enc_dim);
  p.chunk_b = Matrix::Zero(a, 1);
  p.chunk_out = Matrix::Zero(a, 1);
  return p;
}

namespace {

double AdditiveEnergy(const Matrix& w, const Matrix& v, const Matrix& b,
                      const Matrix& out, const Vector& state,
                      const Vector& frame) {
  if (!state.allFinite() || !frame.allFinite()) {
    throw NumericError("non-finite input to attention energy");
  }
  const Vector pre = w * state + v * frame + b.col(0);
  return out.col(0).dot(pre.array().tanh().matrix());
}

}  // namespace

double SelectionEnergy(const AttentionParams& params, const Vector& state,
                       const Vector& frame) {
  return AdditiveEnergy(params.sel_w, params.sel_v, params.sel_b,
                        params.sel_out, state, frame) +
         params.sel_bias(0, 0);
}

double SelectionProbability(const AttentionParams& params, const Vector& state,
                            const Vector& frame) {
  const double e = SelectionEnergy(params, state, frame);
  if (!std::isfinite(e)) throw NumericError("non-finite selection energy");
  return Sigmoid(e);
}

double ChunkEnergy(const AttentionParams& params, const Vector& state,
                   const Vector& frame) {
  return AdditiveEnergy(params.chunk_w, params.chunk_v, params.chunk_b,
                        params.chunk_out, state, frame);
}

AttentionStepResult HardChunkSelect(
    int buffer_len, int prev_index, int chunk_size,
    const std::function<double(int)>& selection_prob,
    const std::function<double(int)>& chunk_energy, bool force) {
  if (prev_index >= buffer_len && buffer_len > 0) {
    throw InvalidArgument("attention position beyond buffer end");
  }
  AttentionStepResult result;
  int chosen = -1;
  for (int t = std::max(prev_index, 0); t < buffer_len; ++t) {
    if (selection_prob(t) >= kSelectionThreshold) {
      chosen = t;
      break;
    }
  }
  if (chosen < 0) {
    if (!force || buffer_len == 0) return result;
    chosen = buffer_len - 1;
    result.forced = true;
  }
  result.status = AttentionStatus::kSelected;
  result.selected_index = chosen;
  result.chunk_start = std::max(0, chosen - chunk_size + 1);
  const int width = chosen - result.chunk_start + 1;
  std::vector<double> energies(width);
  for (int j = 0; j < width; ++j) energies[j] = chunk_energy(result.chunk_start + j);
  const double top = *std::max_element(energies.begin(), energies.end());
  double total = 0.0;
  result.chunk_weights.resize(width);
  for (int j = 0; j < width; ++j) {
    result.chunk_weights[j] = std::exp(energies[j] - top);
    total += result.chunk_weights[j];
  }
  int best = 0;
  for (int j = 0; j < width; ++j) {
    result.chunk_weights[j] /= total;
    if (result.chunk_weights[j] > result.chunk_weights[best]) best = j;
  }
  result.peak_index = result.chunk_start + best;
  return result;
}

Vector ChunkContext(const EncodedBuffer& buffer,
                    const AttentionStepResult& result, int dim) {
  Vector c = Vector::Zero(dim);
  if (!result.selected()) return c;
  for (size_t j = 0; j < result.chunk_weights.size(); ++j) {
    c += result.chunk_weights[j] * buffer[result.chunk_start + static_cast<int>(j)];
  }
  return c;
}

AttentionStepResult MochaInferStep(const Vector& state,
                                   const EncodedBuffer& buffer,
                                   const AttentionState& attention,
                                   const AttentionConfig& config,
                                   const AttentionParams& params, bool force) {
  // Precompute the state half of both energy nets once per step.
  const Vector sel_s = params.sel_w * state + params.sel_b.col(0);
  const Vector chunk_s = params.chunk_w * state + params.chunk_b.col(0);
  if (!state.allFinite()) throw NumericError("non-finite decoder state");
  auto prob = [&](int t) {
    const double e = params.sel_out.col(0).dot(
                         (sel_s + params.sel_v * buffer[t]).array().tanh().matrix()) +
                     params.sel_bias(0, 0);
    if (!std::isfinite(e)) throw NumericError("non-finite selection energy");
    return Sigmoid(e);
  };
  auto energy = [&](int t) {
    return params.chunk_out.col(0).dot(
        (chunk_s + params.chunk_v * buffer[t]).array().tanh().matrix());
  };
  AttentionStepResult r = HardChunkSelect(buffer.size(), attention.prev_index,
                                          config.chunk_size, prob, energy, force);
  const int dim = buffer.empty() ? static_cast<int>(params.sel_v.cols())
                                 : static_cast<int>(buffer[0].size());
  r.context = ChunkContext(buffer, r, dim);
  return r;
}

namespace {

// Softmax weights of window ending at k, written to out[0..width).
int WindowSoftmax(std::span<const double> u, int k, int chunk, double* out) {
  const int start = std::max(0, k - chunk + 1);
  const int width = k - start + 1;
  double top = u[start];
  for (int l = start; l <= k; ++l) top = std::max(top, u[l]);
  double total = 0.0;
  for (int l = 0; l < width; ++l) {
    out[l] = std::exp(u[start + l] - top);
    total += out[l];
  }
  for (int l = 0; l < width; ++l) out[l] /= total;
  return start;
}

}  // namespace

MochaWeights MochaTrainWeights(std::span<const double> selection_energies,
                               std::span<const double> chunk_energies,
                               int chunk_size, const Vector& alpha_prev) {
  const int n = static_cast<int>(selection_energies.size());
  if (static_cast<int>(chunk_energies.size()) != n || alpha_prev.size() != n) {
    throw InvalidArgument("MoChA inputs disagree on length");
  }
  if (chunk_size < 1) throw InvalidArgument("chunk_size must be >= 1");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(selection_energies[j]) || !std::isfinite(chunk_energies[j])) {
      throw NumericError("non-finite MoChA energy");
    }
  }
  MochaWeights w;
  w.p.resize(n);
  w.q.resize(n);
  w.alpha.resize(n);
  w.beta = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    w.p[j] = Sigmoid(selection_energies[j]);
    w.q[j] = alpha_prev[j] + (j > 0 ? (1.0 - w.p[j - 1]) * w.q[j - 1] : 0.0);
    w.alpha[j] = w.p[j] * w.q[j];
  }
  std::vector<double> gamma(chunk_size);
  for (int k = 0; k < n; ++k) {
    const int start = WindowSoftmax(chunk_energies, k, chunk_size, gamma.data());
    for (int j = start; j <= k; ++j) w.beta[j] += w.alpha[k] * gamma[j - start];
  }
  return w;
}

MochaWeightGrads MochaTrainWeightsBackward(
    std::span<const double> chunk_energies, int chunk_size,
    const MochaWeights& w, const Vector& d_alpha,
    const Vector& d_beta) {
  const int n = static_cast<int>(w.alpha.size());
  MochaWeightGrads g;
  g.selection_energies = Vector::Zero(n);
  g.chunk_energies = Vector::Zero(n);
  g.alpha_prev = Vector::Zero(n);
  Vector da = d_alpha;
  std::vector<double> gamma(chunk_size);
  for (int k = 0; k < n; ++k) {
    const int start = WindowSoftmax(chunk_energies, k, chunk_size, gamma.data());
    double mean = 0.0;
    for (int j = start; j <= k; ++j) mean += gamma[j - start] * d_beta[j];
    da[k] += mean;
    for (int j = start; j <= k; ++j) {
      g.chunk_energies[j] += w.alpha[k] * gamma[j - start] * (d_beta[j] - mean);
    }
  }
  double dq_next = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    const bool has_next = j + 1 < n;
    const double dq = da[j] * w.p[j] + (has_next ? dq_next * (1.0 - w.p[j]) : 0.0);
    const double dp = da[j] * w.q[j] - (has_next ? dq_next * w.q[j] : 0.0);
    g.selection_energies[j] = dp * w.p[j] * (1.0 - w.p[j]);
    g.alpha_prev[j] = dq;
    dq_next = dq;
  }
  return g;
}

}  // namespace olas
