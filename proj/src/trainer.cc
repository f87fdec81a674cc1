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

#include "olas/trainer.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace olas {

void TrainConfig::Validate() const {
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw InvalidArgument("label_smoothing must be in [0, 1)");
  }
  if (!(scheduled_sampling >= 0.0 && scheduled_sampling <= 1.0)) {
    throw InvalidArgument("scheduled_sampling must be in [0, 1]");
  }
  if (!(selection_noise >= 0.0)) throw InvalidArgument("selection_noise must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must be in [0, 1)");
  if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

Vector SmoothedTarget(int label, int vocab_size, double epsilon) {
  if (label < 0 || label >= vocab_size) throw InvalidArgument("label out of range");
  Vector q = Vector::Constant(vocab_size, epsilon / vocab_size);
  q(label) += 1.0 - epsilon;
  return q;
}

uint64_t Fnv1a(std::string_view bytes, uint64_t seed) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t ParamsFingerprint(const ModelParams& params) {
  uint64_t h = 14695981039346656037ull;
  params.ForEachTensor([&](const std::string&, const Matrix& m) {
    h = Fnv1a(std::string_view(reinterpret_cast<const char*>(m.data()),
                               sizeof(double) * m.size()),
              h);
  });
  return h;
}

namespace {

int SampleToken(const Vector& probs, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (int v = 0; v < probs.size(); ++v) {
    acc += probs(v);
    if (u < acc) return v;
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

double ForwardLoss(const ModelParams& params, const LasConfig& config,
                   const Matrix& frames, const std::vector<int>& target,
                   const LossOptions& options, std::mt19937_64* rng,
                   ForwardCache* cache) {
  const int vocab = static_cast<int>(params.output.w.rows());
  if (target.size() < 2) throw InvalidArgument("target needs at least BOS and EOS");
  if (options.scheduled_sampling > 0.0 && rng == nullptr) {
    throw InvalidArgument("scheduled sampling needs a random source");
  }
  if (options.selection_noise > 0.0 && rng == nullptr) {
    throw InvalidArgument("selection noise needs a random source");
  }
  std::normal_distribution<double> noise(0.0, options.selection_noise);
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c = ForwardCache();

  const std::vector<Vector> h =
      EncoderForward(params.encoder, config.encoder, frames, &c.encoder);
  const int tp = static_cast<int>(h.size());
  if (tp == 0) throw InvalidArgument("utterance too short to encode");
  const int pdim = config.context_dim();
  c.enc.resize(pdim, tp);
  for (int t = 0; t < tp; ++t) c.enc.col(t) = h[t];

  const AttentionParams& ap = params.attention;
  const Matrix sel_vh = ap.sel_v * c.enc;
  const Matrix chunk_vh = ap.chunk_v * c.enc;
  const int chunk = config.attention.chunk_size;
  const int emb = config.embedding_dim;

  Vector alpha = Vector::Zero(tp);
  alpha(0) = 1.0;
  Vector state = Vector::Zero(config.decoder_hidden);
  Vector context = Vector::Zero(pdim);
  Vector prev_probs;
  double loss = 0.0;
  const int steps = static_cast<int>(target.size()) - 1;
  c.steps.resize(steps);
  for (int i = 0; i < steps; ++i) {
    auto& st = c.steps[i];
    st.input_token = target[i];
    if (i > 0 && options.scheduled_sampling > 0.0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(*rng) <
            options.scheduled_sampling) {
      st.input_token = SampleToken(prev_probs, *rng);
    }
    if (st.input_token < 0 || st.input_token >= vocab) {
      throw InvalidArgument("target token out of range");
    }
    Vector x(emb + pdim);
    x << params.decoder.embedding.row(st.input_token).transpose(), context;
    state = GruForward(params.decoder.gru, x, state, &st.gru);
    st.state = state;

    const Vector sel_s = ap.sel_w * state + ap.sel_b.col(0);
    const Vector chunk_s = ap.chunk_w * state + ap.chunk_b.col(0);
    st.sel_act = (sel_vh.colwise() + sel_s).array().tanh().matrix();
    st.chunk_act = (chunk_vh.colwise() + chunk_s).array().tanh().matrix();
    std::vector<double> sel_e(tp);
    st.chunk_energies.resize(tp);
    for (int t = 0; t < tp; ++t) {
      sel_e[t] = ap.sel_out.col(0).dot(st.sel_act.col(t)) + ap.sel_bias(0, 0);
      if (options.selection_noise > 0.0) sel_e[t] += noise(*rng);
      st.chunk_energies[t] = ap.chunk_out.col(0).dot(st.chunk_act.col(t));
    }
    st.weights = MochaTrainWeights(sel_e, st.chunk_energies, chunk, alpha);
    context = c.enc * st.weights.beta;
    st.context = context;

    Vector so(config.decoder_hidden + pdim);
    so << state, context;
    const Vector logp = LogSoftmax(params.output.w * so + params.output.b.col(0));
    if (!logp.allFinite()) throw NumericError("non-finite output distribution");
    const Vector q = SmoothedTarget(target[i + 1], vocab, options.label_smoothing);
    loss -= q.dot(logp);
    prev_probs = logp.array().exp().matrix();
    st.dlogits = prev_probs - q;
    alpha = st.weights.alpha;
  }
  loss /= steps;
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  c.fingerprint_ = ParamsFingerprint(params);
  c.valid_ = true;
  return loss;
}

void Backward(const ModelParams& params, const LasConfig& config,
              ForwardCache* cache, ModelParams* grad, double scale) {
  if (cache == nullptr || !cache->valid_) throw StateError("backward without a fresh forward cache");
  if (ParamsFingerprint(params) != cache->fingerprint_) {
    throw StateError("parameters changed since the forward pass");
  }
  cache->valid_ = false;
  const ForwardCache& c = *cache;
  const AttentionParams& ap = params.attention;
  AttentionParams& ag = grad->attention;
  const int tp = static_cast<int>(c.enc.cols());
  const int sdim = config.decoder_hidden;
  const int pdim = config.context_dim();
  const int emb = config.embedding_dim;
  const int steps = static_cast<int>(c.steps.size());
  const double g = scale / steps;

  Matrix d_enc = Matrix::Zero(pdim, tp);
  Vector ds_next = Vector::Zero(sdim);
  Vector dc_next = Vector::Zero(pdim);
  Vector d_alpha = Vector::Zero(tp);
  for (int i = steps - 1; i >= 0; --i) {
    const auto& st = c.steps[i];
    const Vector dl = g * st.dlogits;
    Vector so(sdim + pdim);
    so << st.state, st.context;
    grad->output.w.noalias() += dl * so.transpose();
    grad->output.b.col(0) += dl;
    const Vector dso = params.output.w.transpose() * dl;
    Vector ds = dso.head(sdim) + ds_next;
    const Vector dc = dso.tail(pdim) + dc_next;

    const Vector d_beta = c.enc.transpose() * dc;
    d_enc.noalias() += dc * st.weights.beta.transpose();
    const MochaWeightGrads mg = MochaTrainWeightsBackward(
        st.chunk_energies, config.attention.chunk_size, st.weights, d_alpha, d_beta);
    d_alpha = mg.alpha_prev;

    // Selection energy net.
    ag.sel_bias(0, 0) += mg.selection_energies.sum();
    ag.sel_out.col(0) += st.sel_act * mg.selection_energies;
    Matrix dpre = (ap.sel_out.col(0) * mg.selection_energies.transpose())
                      .cwiseProduct((1.0 - st.sel_act.array().square()).matrix());
    Vector dsum = dpre.rowwise().sum();
    ag.sel_w.noalias() += dsum * st.state.transpose();
    ag.sel_b.col(0) += dsum;
    ag.sel_v.noalias() += dpre * c.enc.transpose();
    ds.noalias() += ap.sel_w.transpose() * dsum;
    d_enc.noalias() += ap.sel_v.transpose() * dpre;

    // Chunk energy net.
    ag.chunk_out.col(0) += st.chunk_act * mg.chunk_energies;
    dpre = (ap.chunk_out.col(0) * mg.chunk_energies.transpose())
               .cwiseProduct((1.0 - st.chunk_act.array().square()).matrix());
    dsum = dpre.rowwise().sum();
    ag.chunk_w.noalias() += dsum * st.state.transpose();
    ag.chunk_b.col(0) += dsum;
    ag.chunk_v.noalias() += dpre * c.enc.transpose();
    ds.noalias() += ap.chunk_w.transpose() * dsum;
    d_enc.noalias() += ap.chunk_v.transpose() * dpre;

    Vector dx, dh_prev;
    GruBackward(params.decoder.gru, st.gru, ds, &grad->decoder.gru, &dx, &dh_prev);
    grad->decoder.embedding.row(st.input_token) += dx.head(emb).transpose();
    dc_next = dx.tail(pdim);
    ds_next = std::move(dh_prev);
  }
  std::vector<Vector> d_outputs(tp);
  for (int t = 0; t < tp; ++t) d_outputs[t] = d_enc.col(t);
  EncoderBackward(params.encoder, config.encoder, c.encoder, d_outputs, &grad->encoder);
}

namespace {

uint64_t ExampleSeed(uint64_t seed, int epoch, int example) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(epoch), static_cast<uint32_t>(example)};
  uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

double BatchGradient(const ModelParams& params, const LasConfig& las,
                     const std::vector<const TrainExample*>& batch,
                     const LossOptions& options, uint64_t seed, int epoch,
                     const std::vector<int>& example_ids, Reduction reduction,
                     int threads, ModelParams* grad) {
  const int n = static_cast<int>(batch.size());
  if (n == 0) return 0.0;
  const int vocab = static_cast<int>(params.output.w.rows());
  const double scale = reduction == Reduction::kMean ? 1.0 / n : 1.0;
  std::vector<ModelParams> parts(n);
  std::vector<double> losses(n, 0.0);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](int k) {
    try {
      parts[k] = ModelParams::Zeros(las, vocab);
      std::mt19937_64 rng(ExampleSeed(seed, epoch, example_ids[k]));
      ForwardCache cache;
      losses[k] = ForwardLoss(params, las, batch[k]->frames, batch[k]->target,
                              options, &rng, &cache);
      Backward(params, las, &cache, &parts[k], scale);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < n; k += workers) work(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double loss = 0.0;
  for (int k = 0; k < n; ++k) {
    grad->AddScaled(parts[k], 1.0);
    loss += losses[k];
  }
  return loss * scale;
}

double EvaluateLoss(const ModelParams& params, const LasConfig& config,
                    const std::vector<TrainExample>& examples,
                    double label_smoothing) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) {
    total += ForwardLoss(params, config, ex.frames, ex.target,
                         {label_smoothing, 0.0}, nullptr, nullptr);
  }
  return total / static_cast<double>(examples.size());
}

TrainResult Train(ModelParams params, const LasConfig& config, const Vocab& vocab,
                  const std::vector<TrainExample>& train,
                  const std::vector<TrainExample>& heldout,
                  const TrainConfig& tc) {
  tc.Validate();
  CheckParamShapes(params, config, vocab.size());
  if (train.empty() && tc.epochs > 0) throw InvalidArgument("training corpus is empty");
  for (const auto& ex : train) {
    if (ex.target.size() < 2 || ex.target.front() != vocab.bos_id() ||
        ex.target.back() != vocab.eos_id()) {
      throw InvalidArgument(ex.utt_id + ": target must run from BOS to EOS");
    }
  }
  namespace fs = std::filesystem;
  if (!tc.checkpoint_dir.empty()) fs::create_directories(tc.checkpoint_dir);

  TrainResult result;
  ModelParams velocity = ModelParams::Zeros(config, vocab.size());
  const LossOptions options{tc.label_smoothing, tc.scheduled_sampling, tc.selection_noise};
  std::vector<int> order(train.size());
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(ExampleSeed(tc.seed, epoch, -1));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    double norm_sum = 0.0;
    int updates = 0;
    for (size_t start = 0; start < order.size(); start += tc.batch_size) {
      const size_t end = std::min(order.size(), start + tc.batch_size);
      std::vector<const TrainExample*> batch;
      std::vector<int> ids(order.begin() + start, order.begin() + end);
      for (int id : ids) batch.push_back(&train[id]);
      ModelParams grad = ModelParams::Zeros(config, vocab.size());
      double loss;
      try {
        loss = BatchGradient(params, config, batch, options, tc.seed, epoch, ids,
                             tc.reduction, tc.threads, &grad);
      } catch (const NumericError& e) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) +
                           ": " + e.what());
      }
      const double norm = std::sqrt(grad.SquaredNorm());
      if (!std::isfinite(loss) || !std::isfinite(norm)) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch));
      }
      double step = tc.learning_rate;
      if (tc.clip_norm > 0.0 && norm > tc.clip_norm) step *= tc.clip_norm / norm;
      ModelParams update = velocity;
      velocity.SetZero();
      velocity.AddScaled(update, tc.momentum);
      velocity.AddScaled(grad, -step);
      params.AddScaled(velocity, 1.0);
      loss_sum += tc.reduction == Reduction::kMean ? loss * batch.size() : loss;
      norm_sum += norm;
      ++updates;
    }
    if (!params.AllFinite()) {
      throw NumericError("training diverged in epoch " + std::to_string(epoch));
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(train.size());
    entry.grad_norm = updates > 0 ? norm_sum / updates : 0.0;
    if (!heldout.empty()) {
      entry.heldout_loss = EvaluateLoss(params, config, heldout, tc.label_smoothing);
    }
    result.log.push_back(entry);
    if (!tc.checkpoint_dir.empty()) {
      Checkpoint ck{vocab, config, params, nlohmann::json::object()};
      ck.meta["epoch"] = epoch;
      ck.meta["train_loss"] = entry.train_loss;
      char name[32];
      std::snprintf(name, sizeof(name), "epoch-%03d.ckpt", epoch);
      SaveCheckpoint(ck, (fs::path(tc.checkpoint_dir) / name).string());
      SaveCheckpoint(ck, (fs::path(tc.checkpoint_dir) / "last.ckpt").string());
    }
  }
  result.params = std::move(params);
  return result;
}

nlohmann::json LasConfigToJson(const LasConfig& c) {
  return {{"encoder",
           {{"num_layers", c.encoder.num_layers},
            {"input_dim", c.encoder.input_dim},
            {"hidden_units", c.encoder.hidden_units},
            {"projection_dim", c.encoder.projection_dim}}},
          {"attention",
           {{"chunk_size", c.attention.chunk_size},
            {"energy_hidden_dim", c.attention.energy_hidden_dim},
            {"selection_bias_init", c.attention.selection_bias_init}}},
          {"decoder_hidden", c.decoder_hidden},
          {"embedding_dim", c.embedding_dim}};
}

LasConfig LasConfigFromJson(const nlohmann::json& j) {
  LasConfig c;
  try {
    if (j.contains("encoder")) {
      const auto& e = j.at("encoder");
      c.encoder.num_layers = e.value("num_layers", c.encoder.num_layers);
      c.encoder.input_dim = e.value("input_dim", c.encoder.input_dim);
      c.encoder.hidden_units = e.value("hidden_units", c.encoder.hidden_units);
      c.encoder.projection_dim = e.value("projection_dim", c.encoder.projection_dim);
    }
    if (j.contains("attention")) {
      const auto& a = j.at("attention");
      c.attention.chunk_size = a.value("chunk_size", c.attention.chunk_size);
      c.attention.energy_hidden_dim =
          a.value("energy_hidden_dim", c.attention.energy_hidden_dim);
      c.attention.selection_bias_init =
          a.value("selection_bias_init", c.attention.selection_bias_init);
    }
    c.decoder_hidden = j.value("decoder_hidden", c.decoder_hidden);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model config: ") + e.what());
  }
  c.Validate();
  return c;
}

namespace {

constexpr const char* kMagic = "olas-checkpoint";
constexpr int kVersion = 1;

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ck) {
  std::ostringstream body;
  body << kMagic << ' ' << kVersion << '\n';
  nlohmann::json header = {{"vocab", ck.vocab.tokens()},
                           {"model", LasConfigToJson(ck.config)},
                           {"meta", ck.meta}};
  body << "config " << header.dump() << '\n';
  char buf[32];
  ck.params.ForEachTensor([&](const std::string& name, const Matrix& m) {
    body << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
        body << (c > 0 ? " " : "") << buf;
      }
      body << '\n';
    }
  });
  std::string text = body.str();
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, Fnv1a(text));
  text += "checksum ";
  text += buf;
  text += '\n';
  return text;
}

Checkpoint ParseCheckpoint(const std::string& text) {
  const size_t mark = text.rfind("checksum ");
  if (mark == std::string::npos || (mark > 0 && text[mark - 1] != '\n')) {
    throw ParseError("checkpoint has no checksum line");
  }
  const std::string body = text.substr(0, mark);
  const auto fields = SplitWhitespace(std::string_view(text).substr(mark + 9));
  char want[32];
  std::snprintf(want, sizeof(want), "%016" PRIx64, Fnv1a(body));
  if (fields.size() != 1 || fields[0] != want) throw ParseError("checkpoint checksum mismatch");

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  const auto magic = SplitWhitespace(line);
  if (magic.size() != 2 || magic[0] != kMagic) throw ParseError("not a checkpoint");
  if (magic[1] != std::to_string(kVersion)) {
    throw ParseError("unsupported checkpoint version " + magic[1]);
  }
  std::getline(in, line);
  if (line.rfind("config ", 0) != 0) throw ParseError("checkpoint config line missing");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(7));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint config: ") + e.what());
  }
  Vocab vocab(header.at("vocab").get<std::vector<std::string>>());
  LasConfig config = LasConfigFromJson(header.at("model"));
  ModelParams params = ModelParams::Zeros(config, vocab.size());
  params.ForEachTensor([&](const std::string& name, Matrix& m) {
    if (!std::getline(in, line)) throw ParseError("checkpoint truncated before " + name);
    const auto head = SplitWhitespace(line);
    if (head.size() != 4 || head[0] != "tensor" || head[1] != name ||
        head[2] != std::to_string(m.rows()) || head[3] != std::to_string(m.cols())) {
      throw ParseError("checkpoint tensor header mismatch at " + name + ": '" + line + "'");
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (!std::getline(in, line)) throw ParseError("checkpoint truncated in " + name);
      const auto vals = SplitWhitespace(line);
      if (static_cast<Eigen::Index>(vals.size()) != m.cols()) {
        throw ParseError("checkpoint row width mismatch in " + name);
      }
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        char* end = nullptr;
        m(r, c) = std::strtod(vals[c].c_str(), &end);
        if (end == vals[c].c_str() || *end != '\0') {
          throw ParseError("bad number '" + vals[c] + "' in " + name);
        }
      }
    }
  });
  if (std::getline(in, line) && !SplitWhitespace(line).empty()) {
    throw ParseError("unexpected trailing checkpoint content");
  }
  return {std::move(vocab), config, std::move(params),
          header.value("meta", nlohmann::json::object())};
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  const std::string text = SerializeCheckpoint(checkpoint);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  return ParseCheckpoint(ReadFileToString(path));
}

std::vector<GradCheckResult> GradientCheck(const ModelParams& params,
                                           const LasConfig& config,
                                           const Matrix& frames,
                                           const std::vector<int>& target,
                                           double label_smoothing, double step,
                                           int max_per_tensor, double floor) {
  const int vocab = static_cast<int>(params.output.w.rows());
  const LossOptions options{label_smoothing, 0.0};
  ModelParams analytic = ModelParams::Zeros(config, vocab);
  ForwardCache cache;
  ForwardLoss(params, config, frames, target, options, nullptr, &cache);
  Backward(params, config, &cache, &analytic);

  std::vector<const Matrix*> grads;
  analytic.ForEachTensor([&](const std::string&, const Matrix& m) { grads.push_back(&m); });
  ModelParams probe = params;
  std::vector<std::pair<std::string, Matrix*>> tensors;
  probe.ForEachTensor([&](const std::string& n, Matrix& m) { tensors.emplace_back(n, &m); });

  std::vector<GradCheckResult> out;
  for (size_t k = 0; k < tensors.size(); ++k) {
    Matrix& m = *tensors[k].second;
    GradCheckResult r;
    r.tensor = tensors[k].first;
    const Eigen::Index total = m.size();
    const Eigen::Index count =
        max_per_tensor > 0 ? std::min<Eigen::Index>(total, max_per_tensor) : total;
    for (Eigen::Index j = 0; j < count; ++j) {
      const Eigen::Index idx = count == total ? j : j * total / count;
      const double saved = m.data()[idx];
      m.data()[idx] = saved + step;
      const double up = ForwardLoss(probe, config, frames, target, options, nullptr, nullptr);
      m.data()[idx] = saved - step;
      const double down = ForwardLoss(probe, config, frames, target, options, nullptr, nullptr);
      m.data()[idx] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grads[k]->data()[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      r.max_rel_error = std::max(r.max_rel_error, std::abs(a - numeric) / denom);
      ++r.checked;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace olas
