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

#include "olas/streamer.h"

#include <algorithm>
#include <chrono>

namespace olas {

void StreamConfig::Validate() const {
  if (batch_ms <= 0) throw InvalidArgument("batch_ms must be positive");
  if (min_buffer_ms < 0) throw InvalidArgument("min_buffer_ms must be >= 0");
  if (sil_buffer_ms < min_buffer_ms) {
    throw InvalidArgument("sil_buffer_ms must be >= min_buffer_ms");
  }
}

int ApplicableBufferMs(int last_token, const StreamConfig& config,
                       const Vocab& vocab) {
  return last_token == vocab.sil_id() ? config.sil_buffer_ms
                                      : config.min_buffer_ms;
}

namespace {

std::vector<int> WithoutBosEos(const std::vector<int>& tokens,
                               const Vocab& vocab) {
  std::vector<int> out;
  for (int t : tokens) {
    if (t != vocab.bos_id() && t != vocab.eos_id()) out.push_back(t);
  }
  return out;
}

double ElapsedMs(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

StreamSession::StreamSession(ModelPtr model, StreamConfig stream_config,
                             BeamConfig beam_config, int frame_shift_ms)
    : model_(std::move(model)),
      stream_config_(stream_config),
      beam_config_(beam_config),
      frame_shift_ms_(frame_shift_ms) {
  if (model_ == nullptr) throw InvalidArgument("stream session needs a model");
  if (frame_shift_ms_ <= 0) throw InvalidArgument("frame shift must be positive");
  stream_config_.Validate();
  beam_config_.Validate();
  encoder_state_ = model_->encoder().Reset();
  buffer_ = EncodedBuffer(model_->total_reduction(), frame_shift_ms_);
  beam_.push_back(InitialHypothesis(*model_));
}

int StreamSession::BufferFrames(int last_token) const {
  const int ms = ApplicableBufferMs(last_token, stream_config_, model_->vocab());
  const int64_t frames =
      MsToEncodedFrames(ms, frame_shift_ms_, model_->total_reduction());
  return static_cast<int>(
      std::min<int64_t>(frames, std::numeric_limits<int>::max()));
}

std::vector<int> StreamSession::CommittedTokens() const {
  const Vocab& vocab = model_->vocab();
  if (finalized_) return WithoutBosEos(final_.tokens, vocab);
  std::vector<int> out = restart_prefix_;
  const std::vector<int>& first = beam_.front().tokens;
  for (size_t k = 1; k < first.size(); ++k) {
    const int t = first[k];
    bool shared = t != vocab.eos_id();
    for (const auto& h : beam_) {
      shared = shared && k < h.tokens.size() && h.tokens[k] == t;
    }
    if (!shared) break;
    out.push_back(t);
  }
  return out;
}

std::vector<int> StreamSession::CurrentBest() const {
  const Vocab& vocab = model_->vocab();
  if (finalized_) return WithoutBosEos(final_.tokens, vocab);
  std::vector<int> out = restart_prefix_;
  for (int t : WithoutBosEos(beam_.front().tokens, vocab)) out.push_back(t);
  return out;
}

const DecodeResult& StreamSession::result() const {
  if (!finalized_) throw StateError("session not finalized");
  return final_;
}

void StreamSession::RecordDisplay() {
  std::vector<int> shown = StripNonScoring(CurrentBest(), model_->vocab());
  if (display_.empty() ? shown.empty() : shown == display_.back().tokens) return;
  trace_.push_back({{"event", "display"},
                    {"clock_ms", clock_ms_},
                    {"wall_ms", wall_ms_},
                    {"tokens", shown}});
  display_.push_back({clock_ms_, wall_ms_, std::move(shown)});
}

void StreamSession::DecodeAvailable() {
  const int n = buffer_.size();
  const int batch = batch_index_ - 1;
  nlohmann::json record = {{"event", "batch"},
                           {"batch", batch},
                           {"clock_ms", clock_ms_},
                           {"buffer", n}};
  {
    const Hypothesis& best = beam_.front();
    const int need = BufferFrames(best.last_token());
    record["restricted_start"] = std::max(0, n - need);
    const int tail = n - (best.attention.prev_index + 1);
    if (n == 0 || best.finished || tail < need) {
      record["decision"] = "no-decode";
      trace_.push_back(std::move(record));
      return;
    }
  }

  std::vector<Hypothesis> work = beam_;
  int committed = 0;
  std::string reason;
  while (!work.front().finished) {
    BeamStep step = DecodeStep(*model_, work, buffer_, false, beam_config_, clock_ms_);
    if (step.any_exhausted) {
      reason = "exhausted";
    } else {
      for (size_t i = 0; i < work.size(); ++i) {
        const AttentionStepResult& a = step.attention[i];
        if (!a.selected()) continue;
        if (a.peak_index >= n - BufferFrames(work[i].last_token())) {
          reason = "restricted";
          break;
        }
      }
    }
    const Hypothesis& top = step.beam.front();
    const bool top_eos = step.expanded.front() && top.finished;
    if (reason.empty() && top_eos) {
      if (beam_config_.eos_policy == EosPolicy::kDefer) {
        reason = "eos";
      } else if (beam_config_.eos_policy == EosPolicy::kRestart) {
        if (top.num_emitted() == 1 &&
            top.timeline.back().selected_index == work.front().attention.prev_index) {
          // A segment that would be EOS alone makes no progress: wait.
          reason = "restart-stall";
        } else {
          for (size_t k = 1; k + 1 < top.tokens.size(); ++k) {
            restart_prefix_.push_back(top.tokens[k]);
          }
          restart_timeline_.insert(restart_timeline_.end(), top.timeline.begin(),
                                   top.timeline.end() - 1);
          Hypothesis fresh = InitialHypothesis(*model_);
          fresh.attention.prev_index = top.timeline.back().selected_index;
          trace_.push_back({{"event", "restart"},
                            {"batch", batch},
                            {"clock_ms", clock_ms_},
                            {"prev_index", fresh.attention.prev_index}});
          ++restarts_;
          ++committed;
          work = {std::move(fresh)};
          beam_ = work;
          continue;
        }
      }
    }
    if (!reason.empty()) break;
    if (beam_config_.eos_policy == EosPolicy::kDefer) {
      // EOS may not close a hypothesis while audio is still arriving.
      std::vector<Hypothesis> kept;
      for (size_t k = 0; k < step.beam.size(); ++k) {
        if (step.expanded[k] && step.beam[k].finished) continue;
        kept.push_back(std::move(step.beam[k]));
      }
      step.beam = std::move(kept);
    }
    work = std::move(step.beam);
    beam_ = work;
    ++committed;
  }
  record["committed"] = committed;
  if (reason.empty()) {
    record["decision"] = "committed";
  } else {
    record["decision"] = "backtrack";
    record["reason"] = reason;
    ++backtracks_;
  }
  trace_.push_back(std::move(record));
}

std::vector<int> StreamSession::Push(const Matrix& frames, bool is_last) {
  if (finalized_) throw StateError("push after finalize");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> before = CommittedTokens();
  buffer_.Append(model_->encoder().Push(encoder_state_, frames));
  clock_ms_ += static_cast<double>(frames.rows()) * frame_shift_ms_;
  ++batch_index_;
  if (is_last) {
    wall_ms_ += ElapsedMs(start);
    Finalize();
  } else {
    DecodeAvailable();
    wall_ms_ += ElapsedMs(start);
    RecordDisplay();
  }
  const std::vector<int> after = CommittedTokens();
  return std::vector<int>(after.begin() + std::min(before.size(), after.size()),
                          after.end());
}

DecodeResult StreamSession::Finalize() {
  if (finalized_) throw StateError("session finalized twice");
  const auto start = std::chrono::steady_clock::now();
  buffer_.Append(model_->encoder().Finish(encoder_state_));
  trace_.push_back({{"event", "finalize"},
                    {"clock_ms", clock_ms_},
                    {"buffer", buffer_.size()}});
  DecodeResult r =
      DecodeBuffer(*model_, buffer_, beam_config_, clock_ms_, beam_, &trace_);
  Hypothesis best = r.best;
  if (!restart_prefix_.empty() || !restart_timeline_.empty()) {
    best.tokens.assign(1, model_->vocab().bos_id());
    best.tokens.insert(best.tokens.end(), restart_prefix_.begin(),
                       restart_prefix_.end());
    best.tokens.insert(best.tokens.end(), r.best.tokens.begin() + 1,
                       r.best.tokens.end());
    best.timeline = restart_timeline_;
    best.timeline.insert(best.timeline.end(), r.best.timeline.begin(),
                         r.best.timeline.end());
    best.log_score = 0.0;
    for (const auto& e : best.timeline) best.log_score += e.log_prob;
  }
  AppendTimelineTrace(model_->vocab(), best, &trace_);
  final_.best = std::move(best);
  final_.tokens = final_.best.tokens;
  finalized_ = true;
  wall_ms_ += ElapsedMs(start);
  RecordDisplay();
  final_.trace = trace_;
  return final_;
}

OnlineResult DecodeOnline(ModelPtr model, const FeatureSequence& features,
                          const StreamConfig& stream_config,
                          const BeamConfig& beam_config) {
  ValidateFeatures(features);
  StreamSession session(model, stream_config, beam_config,
                        features.frame_shift_ms);
  const int batch = std::max(1, stream_config.batch_ms / features.frame_shift_ms);
  const int total = features.num_frames();
  if (total == 0) {
    session.Push(Matrix(0, features.dim()), true);
  }
  for (int start = 0; start < total; start += batch) {
    const int rows = std::min(batch, total - start);
    session.Push(features.frames.middleRows(start, rows), start + rows >= total);
  }
  OnlineResult out;
  out.result = session.result();
  out.display = session.display_history();
  out.backtracks = session.backtracks();
  out.restarts = session.restarts();
  out.wall_ms = session.wall_ms();
  out.duration_ms = features.duration_ms();
  return out;
}

OnlineResult DecodeOnlineRestart(ModelPtr model, const FeatureSequence& features,
                                 const StreamConfig& stream_config,
                                 BeamConfig beam_config) {
  beam_config.eos_policy = EosPolicy::kRestart;
  return DecodeOnline(std::move(model), features, stream_config, beam_config);
}

}  // namespace olas
