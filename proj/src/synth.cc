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

#include "olas/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

namespace olas {

void SynthConfig::Validate() const {
  if (num_symbols < 1) throw InvalidArgument("num_symbols must be >= 1");
  if (feature_dim < 1) throw InvalidArgument("feature_dim must be >= 1");
  if (frames_per_token < 1) throw InvalidArgument("frames_per_token must be >= 1");
  if (noise_sigma < 0.0) throw InvalidArgument("noise_sigma must be >= 0");
  if (frame_shift_ms < 1) throw InvalidArgument("frame_shift_ms must be >= 1");
}

std::vector<std::string> SynthSymbols(int count) {
  std::vector<std::string> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(k < 26 ? std::string(1, static_cast<char>('a' + k))
                         : "s" + std::to_string(k));
  }
  return out;
}

Vocab SynthVocab(const SynthConfig& config) {
  return Vocab::WithSymbols(SynthSymbols(config.num_symbols));
}

Matrix SynthPatterns(const SynthConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.pattern_seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double min_d = config.min_pattern_distance;
  Matrix patterns(config.num_symbols, config.feature_dim);
  for (int k = 0; k < config.num_symbols; ++k) {
    int attempts = 0;
    while (true) {
      if (++attempts > 100000) {
        throw InvalidArgument("cannot place patterns at the requested distance");
      }
      for (int j = 0; j < config.feature_dim; ++j) patterns(k, j) = dist(rng);
      bool ok = patterns.row(k).norm() >= min_d;
      for (int i = 0; i < k && ok; ++i) {
        ok = (patterns.row(k) - patterns.row(i)).norm() >= min_d;
      }
      if (ok) break;
    }
  }
  return patterns;
}

SyntheticUtterance GenUtterance(const SynthConfig& config, const Matrix& patterns,
                                uint64_t seed,
                                const std::vector<std::string>& tokens,
                                const std::vector<SilenceSpan>& layout) {
  config.Validate();
  if (patterns.rows() != config.num_symbols || patterns.cols() != config.feature_dim) {
    throw InvalidArgument("pattern table does not match config");
  }
  const auto symbols = SynthSymbols(config.num_symbols);
  std::map<std::string, int> index;
  for (int k = 0; k < config.num_symbols; ++k) index[symbols[k]] = k;

  std::vector<int> silence_before(tokens.size() + 1, 0);
  for (const auto& span : layout) {
    if (span.position < 0 || span.position > static_cast<int>(tokens.size())) {
      throw InvalidArgument("silence position " + std::to_string(span.position) +
                            " outside [0, " + std::to_string(tokens.size()) + "]");
    }
    if (span.frames < 0) throw InvalidArgument("negative silence length");
    silence_before[span.position] += span.frames;
  }
  if (tokens.empty() && silence_before[0] == 0) {
    throw InvalidArgument("utterance needs at least one token or silence frame");
  }

  std::vector<Segment> segments;
  std::vector<int> rows;  // pattern row per frame, -1 for silence
  auto add = [&](const std::string& label, int pattern, int frames) {
    const int start = static_cast<int>(rows.size());
    rows.insert(rows.end(), frames, pattern);
    segments.push_back({label, start, start + frames});
  };
  for (size_t k = 0; k <= tokens.size(); ++k) {
    if (silence_before[k] > 0) add(std::string(kSilLabel), -1, silence_before[k]);
    if (k == tokens.size()) break;
    auto it = index.find(tokens[k]);
    if (it == index.end()) throw InvalidArgument("unknown synthetic token '" + tokens[k] + "'");
    add(tokens[k], it->second, config.frames_per_token);
  }

  SyntheticUtterance u;
  u.tokens = tokens;
  u.alignment = Alignment(std::move(segments));
  u.features.frame_shift_ms = config.frame_shift_ms;
  u.features.frames = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                   config.feature_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (size_t t = 0; t < rows.size(); ++t) {
    if (rows[t] >= 0) u.features.frames.row(t) = patterns.row(rows[t]);
    if (config.noise_sigma > 0.0) {
      for (int j = 0; j < config.feature_dim; ++j) {
        u.features.frames(t, j) += config.noise_sigma * noise(rng);
      }
    }
  }
  return u;
}

void LayoutSpec::Validate() const {
  auto range = [](int lo, int hi, const char* what) {
    if (lo < 0 || hi < lo) throw InvalidArgument(std::string("bad range for ") + what);
  };
  range(min_tokens, max_tokens, "tokens");
  range(lead_min, lead_max, "leading silence");
  range(trail_min, trail_max, "trailing silence");
  range(mid_count_min, mid_count_max, "mid silence count");
  range(mid_min, mid_max, "mid silence");
  if (quantum < 1) throw InvalidArgument("quantum must be >= 1");
}

Corpus GenCorpus(const SynthConfig& config, const LayoutSpec& layout,
                 int num_utterances, uint64_t seed, const std::string& id_prefix) {
  layout.Validate();
  if (num_utterances < 0) throw InvalidArgument("negative corpus size");
  const Matrix patterns = SynthPatterns(config);
  const auto symbols = SynthSymbols(config.num_symbols);
  Corpus corpus{SynthVocab(config), {}};
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto quantize = [&](int frames) { return frames / layout.quantum * layout.quantum; };
  for (int u = 0; u < num_utterances; ++u) {
    const int n = std::max(1, uniform(layout.min_tokens, layout.max_tokens));
    std::vector<std::string> tokens;
    for (int k = 0; k < n; ++k) tokens.push_back(symbols[uniform(0, config.num_symbols - 1)]);
    std::vector<SilenceSpan> spans;
    spans.push_back({0, quantize(uniform(layout.lead_min, layout.lead_max))});
    spans.push_back({n, quantize(uniform(layout.trail_min, layout.trail_max))});
    const int mids = n > 1 ? std::min(uniform(layout.mid_count_min, layout.mid_count_max), n - 1) : 0;
    std::vector<int> slots;
    for (int k = 1; k < n; ++k) slots.push_back(k);
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(mids);
    std::sort(slots.begin(), slots.end());
    for (int pos : slots) spans.push_back({pos, quantize(uniform(layout.mid_min, layout.mid_max))});
    const uint64_t utt_seed = rng();
    SyntheticUtterance s = GenUtterance(config, patterns, utt_seed, tokens, spans);
    char id[64];
    std::snprintf(id, sizeof(id), "%s%05d", id_prefix.c_str(), u);
    corpus.entries.push_back({id, std::move(s.features), std::move(s.tokens),
                              std::move(s.alignment)});
  }
  return corpus;
}

OracleMode ParseOracleMode(const std::string& name) {
  if (name == "aware" || name == "silence_aware") return OracleMode::kSilenceAware;
  if (name == "skip" || name == "silence_skipping") return OracleMode::kSilenceSkipping;
  throw InvalidArgument("unknown oracle mode '" + name + "'");
}

void OracleConfig::Validate() const {
  if (num_layers < 1) throw InvalidArgument("oracle num_layers must be >= 1");
  if (chunk_size < 1) throw InvalidArgument("oracle chunk_size must be >= 1");
  if (sil_duration_encoded < 1) throw InvalidArgument("sil_duration_encoded must be >= 1");
  if (restart_blind_frames < 0) throw InvalidArgument("restart_blind_frames must be >= 0");
  if (!(floor_prob > 0.0 && floor_prob < 1e-2)) throw InvalidArgument("floor_prob out of range");
}

namespace {

EncoderConfig OracleEncoderConfig(const OracleConfig& config, int feature_dim) {
  EncoderConfig ec;
  ec.num_layers = config.num_layers;
  ec.input_dim = feature_dim;
  ec.hidden_units = 1;
  ec.projection_dim = 1;
  return ec;
}

constexpr double kOn = 20.0;     // selection energy at the target frame
constexpr double kPeak = 5.0;    // chunk energy at the target frame

}  // namespace

OracleModel::OracleModel(Vocab vocab, OracleConfig config, int feature_dim,
                         const Alignment& alignment)
    : vocab_(std::move(vocab)),
      config_((config.Validate(), config)),
      encoder_(OracleEncoderConfig(config_, feature_dim),
               EncoderParams::Zeros(OracleEncoderConfig(config_, feature_dim))) {
  const int r = encoder_.config().total_reduction();
  const int total = alignment.num_frames();
  const int encoded = (total + r - 1) / r;
  const auto& segs = alignment.segments();
  // Encoded frame t stands for the input frame at the centre of its span.
  std::vector<int> source(encoded);
  size_t s = 0;
  for (int t = 0; t < encoded; ++t) {
    const int centre = std::min(t * r + r / 2, total - 1);
    while (segs[s].end_frame <= centre) ++s;
    source[t] = static_cast<int>(s);
  }
  // Group frames into runs: one per speech segment, one per silence stretch.
  std::vector<int> run_label;  // token id, or -1 for silence
  segment_of_.resize(encoded);
  for (int t = 0; t < encoded; ++t) {
    const Segment& seg = segs[source[t]];
    const bool speech = !seg.is_silence();
    const bool same = t > 0 && (speech ? source[t] == source[t - 1]
                                       : !segment_speech_.back());
    if (!same) {
      int label = -1;
      if (speech) {
        if (!vocab_.Contains(seg.label)) {
          throw UnsupportedInput("alignment label '" + seg.label + "' not in vocab");
        }
        label = vocab_.IdOf(seg.label);
      }
      segment_start_.push_back(t);
      segment_speech_.push_back(speech);
      run_label.push_back(label);
    }
    segment_of_[t] = static_cast<int>(segment_start_.size()) - 1;
  }
  token_at_.assign(encoded, -1);
  const int runs = static_cast<int>(segment_start_.size());
  for (int k = 0; k < runs; ++k) {
    const int start = segment_start_[k];
    const int end = k + 1 < runs ? segment_start_[k + 1] : encoded;
    if (segment_speech_[k]) {
      token_at_[end - 1] = run_label[k];
      continue;
    }
    if (config_.mode != OracleMode::kSilenceAware) continue;
    const int length = end - start;
    if (length < config_.MinSilenceEncoded()) continue;
    const int count = std::max(1, length / config_.sil_duration_encoded);
    for (int j = 1; j <= count; ++j) {
      token_at_[start + std::min(j * config_.sil_duration_encoded, length) - 1] =
          vocab_.sil_id();
    }
  }
  for (int t = 0; t < encoded; ++t) {
    if (token_at_[t] < 0) continue;
    emission_frames_.push_back(t);
    emission_tokens_.push_back(token_at_[t]);
  }
}

DecoderState OracleModel::InitialState() const {
  return {Vector::Zero(1), Vector::Zero(1)};
}

int OracleModel::Target(int prev_index, int buffer_len, int emitted,
                        bool fresh) const {
  if (config_.mode == OracleMode::kSilenceAware) {
    auto it = std::upper_bound(emission_frames_.begin(), emission_frames_.end(),
                               prev_index);
    return it != emission_frames_.end() ? *it : num_encoded_frames() - 1;
  }
  const int64_t blind_until = fresh ? static_cast<int64_t>(prev_index) +
                                          config_.restart_blind_frames
                                    : std::numeric_limits<int64_t>::min();
  for (int t = prev_index + 1; t < buffer_len; ++t) {
    const int run = segment_of_[t];
    if (!segment_speech_[run] || segment_start_[run] <= blind_until) continue;
    // First audible speech after prev: wait until its end has arrived.
    const int end = run + 1 < static_cast<int>(segment_start_.size())
                        ? segment_start_[run + 1] - 1
                        : num_encoded_frames() - 1;
    return end < buffer_len ? end : -1;
  }
  if (emitted > 0 && prev_index + 1 < buffer_len) return prev_index + 1;
  return -1;
}

StepOutput OracleModel::Step(const DecoderState& prev, int prev_token,
                             const EncodedBuffer& buffer,
                             const AttentionState& attention, bool force) const {
  if (!vocab_.IsValid(prev_token)) throw InvalidArgument("bad previous token");
  const int n = buffer.size();
  if (n > num_encoded_frames()) {
    throw UnsupportedInput("buffer of " + std::to_string(n) +
                           " frames exceeds the synthetic utterance (" +
                           std::to_string(num_encoded_frames()) + ")");
  }
  const int prev_index = attention.prev_index;
  // Attention depends only on how far the hypothesis has come, not on which
  // tokens it chose, so every beam entry sees the same acoustics.
  const double count = prev.recurrent(0) + (prev_token != vocab_.bos_id() ? 1.0 : 0.0);
  const bool fresh = prev_token == vocab_.bos_id() && prev_index >= 0;
  const int target = Target(prev_index, n, static_cast<int>(count), fresh);

  StepOutput out;
  out.next.recurrent = Vector::Constant(1, count);
  out.attention = HardChunkSelect(
      n, prev_index, config_.chunk_size,
      [&](int t) { return Sigmoid(t == target ? kOn : -kOn); },
      [&](int t) { return t == target ? kPeak : 0.0; }, force);
  out.attention.context = ChunkContext(buffer, out.attention, 1);
  out.next.context = out.attention.context;
  if (!out.attention.selected()) return out;

  const int s = out.attention.selected_index;
  const int token = s > prev_index && token_at_[s] >= 0 ? token_at_[s] : vocab_.eos_id();
  const int v = vocab_.size();
  out.log_probs = Vector::Constant(v, std::log(config_.floor_prob));
  out.log_probs(token) = std::log(1.0 - (v - 1) * config_.floor_prob);
  return out;
}

}  // namespace olas
