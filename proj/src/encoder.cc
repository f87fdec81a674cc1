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

#include "olas/encoder.h"

#include <string>

namespace olas {

int EncoderConfig::total_reduction() const {
  int r = 1;
  for (int k = 0; k < num_layers; ++k) r *= kPyramidReduction;
  return r;
}

int EncoderConfig::LayerInputDim(int layer) const {
  return kPyramidReduction * (layer == 0 ? input_dim : projection_dim);
}

void EncoderConfig::Validate() const {
  if (num_layers < 1) throw InvalidArgument("encoder needs at least one layer");
  if (input_dim <= 0 || hidden_units <= 0 || projection_dim <= 0) {
    throw InvalidArgument("encoder dimensions must be positive");
  }
}

EncoderParams EncoderParams::Zeros(const EncoderConfig& config) {
  config.Validate();
  EncoderParams p;
  for (int k = 0; k < config.num_layers; ++k) {
    p.layers.push_back(
        {GruParams::Zeros(config.LayerInputDim(k), config.hidden_units),
         Matrix::Zero(config.projection_dim, config.hidden_units),
         Matrix::Zero(config.projection_dim, 1)});
  }
  return p;
}

void EncodedBuffer::Append(std::vector<Vector> frames) {
  for (auto& f : frames) frames_.push_back(std::move(f));
}

Encoder::Encoder(EncoderConfig config, EncoderParams params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  if (static_cast<int>(params_.layers.size()) != config_.num_layers) {
    throw InvalidArgument("encoder params have " +
                          std::to_string(params_.layers.size()) +
                          " layers, config wants " +
                          std::to_string(config_.num_layers));
  }
  const int hd = config_.hidden_units;
  for (int k = 0; k < config_.num_layers; ++k) {
    const auto& l = params_.layers[k];
    const bool ok = l.gru.w.rows() == 3 * hd &&
                    l.gru.w.cols() == config_.LayerInputDim(k) &&
                    l.gru.u.rows() == 3 * hd && l.gru.u.cols() == hd &&
                    l.gru.b.rows() == 3 * hd && l.gru.b.cols() == 1 &&
                    l.proj.rows() == config_.projection_dim &&
                    l.proj.cols() == hd &&
                    l.proj_b.rows() == config_.projection_dim &&
                    l.proj_b.cols() == 1;
    if (!ok) throw InvalidArgument("encoder layer " + std::to_string(k) + " misshapen");
  }
}

EncoderState Encoder::Reset() const {
  EncoderState s;
  s.hidden.assign(config_.num_layers, Vector::Zero(config_.hidden_units));
  s.pending.assign(config_.num_layers, std::nullopt);
  return s;
}

Vector Encoder::RunLayer(int layer, const Vector& pair, Vector& hidden) const {
  const auto& l = params_.layers[layer];
  hidden = GruForward(l.gru, pair, hidden);
  return l.proj * hidden + l.proj_b.col(0);
}

void Encoder::Feed(EncoderState& state, int layer, const Vector& frame,
                   std::vector<Vector>& out) const {
  auto& pending = state.pending[layer];
  if (!pending) {
    pending = frame;
    return;
  }
  Vector pair(pending->size() + frame.size());
  pair << *pending, frame;
  pending.reset();
  Vector h = RunLayer(layer, pair, state.hidden[layer]);
  if (layer + 1 < config_.num_layers) {
    Feed(state, layer + 1, h, out);
  } else {
    out.push_back(std::move(h));
  }
}

std::vector<Vector> Encoder::Push(EncoderState& state, const Matrix& frames) const {
  if (state.finished) throw StateError("encoder push after finish");
  std::vector<Vector> out;
  if (frames.rows() == 0) return out;
  if (frames.cols() != config_.input_dim) {
    throw InvalidArgument("feature dim " + std::to_string(frames.cols()) +
                          " != encoder input dim " +
                          std::to_string(config_.input_dim));
  }
  if (!frames.allFinite()) throw NumericError("non-finite feature pushed to encoder");
  for (int t = 0; t < frames.rows(); ++t) {
    Feed(state, 0, frames.row(t).transpose(), out);
  }
  state.frames_consumed += frames.rows();
  state.frames_emitted += static_cast<int64_t>(out.size());
  return out;
}

std::vector<Vector> Encoder::Finish(EncoderState& state) const {
  if (state.finished) throw StateError("encoder finished twice");
  state.finished = true;
  std::vector<Vector> out;
  for (int k = 0; k < config_.num_layers; ++k) {
    auto& pending = state.pending[k];
    if (!pending) continue;
    Vector pair(2 * pending->size());
    pair << *pending, *pending;
    pending.reset();
    Vector h = RunLayer(k, pair, state.hidden[k]);
    if (k + 1 < config_.num_layers) {
      Feed(state, k + 1, h, out);
    } else {
      out.push_back(std::move(h));
    }
  }
  state.frames_emitted += static_cast<int64_t>(out.size());
  return out;
}

std::vector<Vector> Encoder::EncodeOffline(const Matrix& frames) const {
  if (frames.rows() > 0 && frames.cols() != config_.input_dim) {
    throw InvalidArgument("feature dim mismatch in offline encode");
  }
  return EncoderForward(params_, config_, frames, nullptr);
}

std::vector<Vector> EncoderForward(const EncoderParams& params,
                                   const EncoderConfig& config,
                                   const Matrix& frames, EncoderTrace* trace) {
  std::vector<Vector> seq;
  seq.reserve(frames.rows());
  for (int t = 0; t < frames.rows(); ++t) seq.push_back(frames.row(t).transpose());
  if (trace != nullptr) {
    trace->layers.assign(config.num_layers, {});
    trace->outputs.assign(config.num_layers, {});
    trace->input_frames = static_cast<int>(frames.rows());
  }
  for (int k = 0; k < config.num_layers; ++k) {
    const auto& l = params.layers[k];
    const int n = static_cast<int>(seq.size());
    const int steps = (n + 1) / 2;
    std::vector<Vector> next;
    next.reserve(steps);
    Vector hidden = Vector::Zero(config.hidden_units);
    EncoderTrace::Layer* lt = trace ? &trace->layers[k] : nullptr;
    for (int j = 0; j < steps; ++j) {
      const int a = 2 * j;
      const int b = std::min(2 * j + 1, n - 1);  // duplicate the odd tail
      Vector pair(seq[a].size() * 2);
      pair << seq[a], seq[b];
      GruCache cache;
      hidden = GruForward(l.gru, pair, hidden, lt ? &cache : nullptr);
      next.push_back(l.proj * hidden + l.proj_b.col(0));
      if (lt) {
        lt->source.push_back(a);
        lt->source.push_back(b);
        lt->cells.push_back(std::move(cache));
        lt->hidden.push_back(hidden);
      }
    }
    if (trace) trace->outputs[k] = next;
    seq = std::move(next);
  }
  return seq;
}

void EncoderBackward(const EncoderParams& params, const EncoderConfig& config,
                     const EncoderTrace& trace,
                     const std::vector<Vector>& d_outputs,
                     EncoderParams* grad) {
  std::vector<Vector> d_seq = d_outputs;
  for (int k = config.num_layers - 1; k >= 0; --k) {
    const auto& l = params.layers[k];
    auto& g = grad->layers[k];
    const auto& lt = trace.layers[k];
    const int steps = static_cast<int>(lt.cells.size());
    const int prev_len = k == 0 ? trace.input_frames
                                : static_cast<int>(trace.outputs[k - 1].size());
    const int prev_dim = config.LayerInputDim(k) / kPyramidReduction;
    std::vector<Vector> d_prev(prev_len, Vector::Zero(prev_dim));
    Vector d_hidden_next = Vector::Zero(config.hidden_units);
    for (int j = steps - 1; j >= 0; --j) {
      const Vector& dy = d_seq[j];
      g.proj.noalias() += dy * lt.hidden[j].transpose();
      g.proj_b.col(0) += dy;
      Vector dh = l.proj.transpose() * dy + d_hidden_next;
      Vector dx, dh_prev;
      GruBackward(l.gru, lt.cells[j], dh, &g.gru, &dx, &dh_prev);
      d_prev[lt.source[2 * j]] += dx.head(prev_dim);
      d_prev[lt.source[2 * j + 1]] += dx.tail(prev_dim);
      d_hidden_next = std::move(dh_prev);
    }
    d_seq = std::move(d_prev);
  }
}

}  // namespace olas
