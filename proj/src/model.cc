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

#include "olas/model.h"

#include <cmath>

namespace olas {

Vector LogSoftmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return (logits.array() - lse).matrix();
}

void LasConfig::Validate() const {
  encoder.Validate();
  attention.Validate();
  if (decoder_hidden <= 0 || embedding_dim <= 0) {
    throw InvalidArgument("decoder dimensions must be positive");
  }
}

ModelParams ModelParams::Zeros(const LasConfig& config, int vocab_size) {
  config.Validate();
  ModelParams p;
  p.encoder = EncoderParams::Zeros(config.encoder);
  p.attention = AttentionParams::Zeros(config.attention, config.decoder_hidden,
                                       config.context_dim());
  p.decoder.embedding = Matrix::Zero(vocab_size, config.embedding_dim);
  p.decoder.gru = GruParams::Zeros(config.embedding_dim + config.context_dim(),
                                   config.decoder_hidden);
  p.output.w = Matrix::Zero(vocab_size, config.decoder_hidden + config.context_dim());
  p.output.b = Matrix::Zero(vocab_size, 1);
  return p;
}

ModelParams ModelParams::Random(const LasConfig& config, int vocab_size,
                                uint64_t seed) {
  ModelParams p = Zeros(config, vocab_size);
  std::mt19937_64 rng(seed);
  p.ForEachTensor([&](const std::string& name, Matrix& m) {
    const bool is_bias = name.ends_with(".b") || name.ends_with("_b") ||
                         name.ends_with("bias");
    if (is_bias) return;
    const bool is_out = name.ends_with("_out");
    const double scale = 1.0 / std::sqrt(static_cast<double>(is_out ? m.rows() : m.cols()));
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  });
  p.attention.sel_bias(0, 0) = config.attention.selection_bias_init;
  return p;
}

namespace {

template <typename Params, typename Fn>
void VisitTensors(Params& p, Fn&& fn) {
  for (size_t k = 0; k < p.encoder.layers.size(); ++k) {
    auto& l = p.encoder.layers[k];
    const std::string pre = "encoder.layer" + std::to_string(k) + ".";
    fn(pre + "gru.w", l.gru.w);
    fn(pre + "gru.u", l.gru.u);
    fn(pre + "gru.b", l.gru.b);
    fn(pre + "proj", l.proj);
    fn(pre + "proj_b", l.proj_b);
  }
  auto& a = p.attention;
  fn("attention.sel_w", a.sel_w);
  fn("attention.sel_v", a.sel_v);
  fn("attention.sel_b", a.sel_b);
  fn("attention.sel_out", a.sel_out);
  fn("attention.sel_bias", a.sel_bias);
  fn("attention.chunk_w", a.chunk_w);
  fn("attention.chunk_v", a.chunk_v);
  fn("attention.chunk_b", a.chunk_b);
  fn("attention.chunk_out", a.chunk_out);
  fn("decoder.embedding", p.decoder.embedding);
  fn("decoder.gru.w", p.decoder.gru.w);
  fn("decoder.gru.u", p.decoder.gru.u);
  fn("decoder.gru.b", p.decoder.gru.b);
  fn("output.w", p.output.w);
  fn("output.b", p.output.b);
}

}  // namespace

void ModelParams::ForEachTensor(
    const std::function<void(const std::string&, Matrix&)>& fn) {
  VisitTensors(*this, fn);
}

void ModelParams::ForEachTensor(
    const std::function<void(const std::string&, const Matrix&)>& fn) const {
  VisitTensors(*this, fn);
}

int64_t ModelParams::NumParameters() const {
  int64_t n = 0;
  ForEachTensor([&](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

bool ModelParams::AllFinite() const {
  bool ok = true;
  ForEachTensor([&](const std::string&, const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

void ModelParams::SetZero() {
  ForEachTensor([](const std::string&, Matrix& m) { m.setZero(); });
}

void ModelParams::AddScaled(const ModelParams& other, double scale) {
  std::vector<const Matrix*> src;
  other.ForEachTensor([&](const std::string&, const Matrix& m) { src.push_back(&m); });
  size_t i = 0;
  ForEachTensor([&](const std::string& name, Matrix& m) {
    if (i >= src.size() || src[i]->rows() != m.rows() || src[i]->cols() != m.cols()) {
      throw InvalidArgument("parameter layout mismatch at " + name);
    }
    m += scale * *src[i++];
  });
}

double ModelParams::SquaredNorm() const {
  double s = 0.0;
  ForEachTensor([&](const std::string&, const Matrix& m) { s += m.squaredNorm(); });
  return s;
}

void CheckParamShapes(const ModelParams& params, const LasConfig& config,
                      int vocab_size) {
  const ModelParams ref = ModelParams::Zeros(config, vocab_size);
  std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> want;
  ref.ForEachTensor([&](const std::string& n, const Matrix& m) {
    want.push_back({n, {m.rows(), m.cols()}});
  });
  size_t i = 0;
  params.ForEachTensor([&](const std::string& n, const Matrix& m) {
    if (i >= want.size() || want[i].first != n) {
      throw InvalidArgument("unexpected parameter tensor " + n);
    }
    if (want[i].second != std::make_pair(m.rows(), m.cols())) {
      throw InvalidArgument("parameter " + n + " has shape " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", expected " + std::to_string(want[i].second.first) + "x" +
                            std::to_string(want[i].second.second));
    }
    ++i;
  });
  if (i != want.size()) throw InvalidArgument("parameter set incomplete");
}

LasModel::LasModel(Vocab vocab, LasConfig config, ModelParams params)
    : vocab_(std::move(vocab)),
      config_(config),
      params_((CheckParamShapes(params, config, vocab_.size()), std::move(params))),
      encoder_(config_.encoder, params_.encoder) {}

DecoderState LasModel::InitialState() const {
  return {Vector::Zero(config_.decoder_hidden), Vector::Zero(config_.context_dim())};
}

StepOutput LasModel::Step(const DecoderState& prev, int prev_token,
                          const EncodedBuffer& buffer,
                          const AttentionState& attention, bool force) const {
  if (!vocab_.IsValid(prev_token)) throw InvalidArgument("bad previous token");
  const int e = config_.embedding_dim;
  Vector x(e + config_.context_dim());
  x << params_.decoder.embedding.row(prev_token).transpose(), prev.context;
  StepOutput out;
  out.next.recurrent = GruForward(params_.decoder.gru, x, prev.recurrent);
  out.attention = MochaInferStep(out.next.recurrent, buffer, attention,
                                 config_.attention, params_.attention, force);
  if (!out.attention.selected()) return out;
  out.next.context = out.attention.context;
  Vector so(config_.decoder_hidden + config_.context_dim());
  so << out.next.recurrent, out.next.context;
  const Vector logits = params_.output.w * so + params_.output.b.col(0);
  if (!logits.allFinite()) throw NumericError("non-finite output logits");
  out.log_probs = LogSoftmax(logits);
  return out;
}

}  // namespace olas
