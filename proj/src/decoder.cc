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

#include "olas/decoder.h"

#include <algorithm>
#include <numeric>

namespace olas {

EosPolicy ParseEosPolicy(const std::string& name) {
  if (name == "defer") return EosPolicy::kDefer;
  if (name == "restart") return EosPolicy::kRestart;
  if (name == "accept") return EosPolicy::kAccept;
  throw InvalidArgument("unknown eos policy '" + name + "'");
}

std::string EosPolicyName(EosPolicy policy) {
  switch (policy) {
    case EosPolicy::kDefer: return "defer";
    case EosPolicy::kRestart: return "restart";
    case EosPolicy::kAccept: return "accept";
  }
  return "?";
}

void BeamConfig::Validate() const {
  if (beam_size < 1) throw InvalidArgument("beam_size must be >= 1");
  if (cap_base < 1 || cap_per_frame < 0) throw InvalidArgument("token cap must be positive");
}

Hypothesis InitialHypothesis(const Model& model) {
  Hypothesis h;
  h.tokens = {model.vocab().bos_id()};
  h.state = model.InitialState();
  return h;
}

BeamStep DecodeStep(const Model& model, const std::vector<Hypothesis>& beam,
                    const EncodedBuffer& buffer, bool buffer_complete,
                    const BeamConfig& config, double clock_ms) {
  config.Validate();
  if (beam.empty()) throw InvalidArgument("DecodeStep on an empty beam");
  const Vocab& vocab = model.vocab();
  const int cap = config.MaxTokens(buffer.size());

  struct Candidate {
    Hypothesis hyp;
    int parent;
    bool expanded;
  };
  std::vector<Candidate> pool;
  BeamStep out;
  out.attention.resize(beam.size());

  for (int i = 0; i < static_cast<int>(beam.size()); ++i) {
    const Hypothesis& h = beam[i];
    if (h.finished) {
      pool.push_back({h, i, false});
      continue;
    }
    if (h.num_emitted() >= cap) {
      Hypothesis closed = h;
      if (buffer_complete) {
        Emission e;
        e.token = vocab.eos_id();
        if (!h.timeline.empty()) {
          e.selected_index = h.timeline.back().selected_index;
          e.peak_index = h.timeline.back().peak_index;
        }
        e.clock_ms = clock_ms;
        e.runaway = true;
        closed.tokens.push_back(vocab.eos_id());
        closed.timeline.push_back(e);
        closed.finished = true;
        closed.stalled = false;
        ++out.runaways;
      } else {
        closed.stalled = true;
        out.any_exhausted = true;
      }
      pool.push_back({std::move(closed), i, buffer_complete});
      continue;
    }
    StepOutput step = model.Step(h.state, h.last_token(), buffer, h.attention,
                                 buffer_complete);
    out.attention[i] = step.attention;
    if (!step.attention.selected()) {
      out.any_exhausted = true;
      Hypothesis stalled = h;
      stalled.stalled = true;
      pool.push_back({std::move(stalled), i, false});
      continue;
    }
    if (step.attention.forced) ++out.forced_selections;
    for (int v = 0; v < vocab.size(); ++v) {
      if (v == vocab.bos_id()) continue;
      Candidate c{h, i, true};
      Hypothesis& child = c.hyp;
      child.tokens.push_back(v);
      child.log_score += step.log_probs[v];
      child.state = step.next;
      child.attention.prev_index = step.attention.selected_index;
      child.finished = v == vocab.eos_id();
      child.stalled = false;
      child.timeline.push_back({v, step.attention.selected_index,
                                step.attention.peak_index, clock_ms,
                                step.log_probs[v], step.attention.forced, false});
      pool.push_back(std::move(c));
    }
  }

  std::vector<int> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pool[a].hyp.log_score > pool[b].hyp.log_score;
  });
  const int keep = std::min<int>(config.beam_size, static_cast<int>(order.size()));
  for (int k = 0; k < keep; ++k) {
    Candidate& c = pool[order[k]];
    out.beam.push_back(std::move(c.hyp));
    out.parent.push_back(c.parent);
    out.expanded.push_back(c.expanded);
  }
  return out;
}

nlohmann::json EmissionRecord(const Vocab& vocab, const Emission& e, int index,
                              double cumulative_score) {
  return {{"event", "emit"},
          {"index", index},
          {"token", vocab.TokenOf(e.token)},
          {"id", e.token},
          {"selected", e.selected_index},
          {"peak", e.peak_index},
          {"log_prob", e.log_prob},
          {"score", cumulative_score},
          {"clock_ms", e.clock_ms},
          {"forced", e.forced},
          {"runaway", e.runaway}};
}

void AppendTimelineTrace(const Vocab& vocab, const Hypothesis& hyp,
                         std::vector<nlohmann::json>* trace) {
  double score = 0.0;
  for (size_t k = 0; k < hyp.timeline.size(); ++k) {
    score += hyp.timeline[k].log_prob;
    trace->push_back(EmissionRecord(vocab, hyp.timeline[k], static_cast<int>(k), score));
  }
}

DecodeResult DecodeBuffer(const Model& model, const EncodedBuffer& buffer,
                          const BeamConfig& config, double clock_ms,
                          std::vector<Hypothesis> beam,
                          std::vector<nlohmann::json>* trace) {
  DecodeResult result;
  if (beam.empty()) beam.push_back(InitialHypothesis(model));
  if (buffer.empty()) {
    // Nothing to attend to: close every open hypothesis immediately.
    for (auto& h : beam) {
      if (h.finished) continue;
      Emission e;
      e.token = model.vocab().eos_id();
      e.selected_index = h.attention.prev_index;
      e.peak_index = h.attention.prev_index;
      e.clock_ms = clock_ms;
      e.forced = true;
      h.tokens.push_back(e.token);
      h.timeline.push_back(e);
      h.finished = true;
    }
  }
  while (!beam.front().finished) {
    BeamStep step = DecodeStep(model, beam, buffer, true, config, clock_ms);
    if (trace != nullptr) {
      if (step.forced_selections > 0) {
        trace->push_back({{"event", "forced_selection"},
                          {"count", step.forced_selections},
                          {"buffer", buffer.size()}});
      }
      if (step.runaways > 0) {
        trace->push_back({{"event", "runaway"}, {"count", step.runaways},
                          {"cap", config.MaxTokens(buffer.size())}});
      }
    }
    beam = std::move(step.beam);
  }
  result.best = beam.front();
  result.tokens = result.best.tokens;
  return result;
}

DecodeResult DecodeOffline(const Model& model, const FeatureSequence& features,
                           const BeamConfig& config) {
  config.Validate();
  ValidateFeatures(features);
  const Encoder& enc = model.encoder();
  EncoderState state = enc.Reset();
  EncodedBuffer buffer(enc.config().total_reduction(), features.frame_shift_ms);
  buffer.Append(enc.Push(state, features.frames));
  buffer.Append(enc.Finish(state));
  std::vector<nlohmann::json> trace;
  DecodeResult r = DecodeBuffer(model, buffer, config, features.duration_ms(), {},
                                &trace);
  AppendTimelineTrace(model.vocab(), r.best, &trace);
  r.trace = std::move(trace);
  return r;
}

void WriteJsonLines(const std::vector<nlohmann::json>& records,
                    std::ostream& out) {
  for (const auto& r : records) out << r.dump() << '\n';
}

}  // namespace olas
