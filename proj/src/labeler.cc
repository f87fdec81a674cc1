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

#include "olas/labeler.h"

#include <algorithm>
#include <map>

namespace olas {

void LabelerConfig::Validate() const {
  if (duration_frames < 1) throw InvalidArgument("duration_frames must be >= 1");
  if (MinSegmentFrames() < 0) throw InvalidArgument("min_segment_frames must be >= 0");
}

int SilenceTokenCount(int length, const LabelerConfig& config) {
  if (length <= 0 || length < config.MinSegmentFrames()) return 0;
  return std::max(1, length / config.duration_frames);
}

namespace {

std::vector<std::string> Label(const std::vector<std::string>& reference,
                               const Alignment& alignment,
                               const LabelerConfig& config, LabelStats* stats) {
  config.Validate();
  const std::string sil(kSilToken);
  for (size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] == sil || reference[i] == kSilLabel) {
      throw InvalidArgument("reference already contains silence at position " +
                            std::to_string(i));
    }
  }
  std::vector<std::string> out;
  size_t next = 0;
  for (const Segment& seg : alignment.segments()) {
    if (seg.is_silence()) {
      const int n = SilenceTokenCount(seg.length(), config);
      if (stats != nullptr) {
        stats->sil_inserted += n;
        (n > 0 ? stats->segments_labeled : stats->segments_skipped) += 1;
      }
      out.insert(out.end(), n, sil);
      continue;
    }
    if (next >= reference.size()) {
      throw InvalidArgument("alignment has extra token '" + seg.label +
                            "' at frame " + std::to_string(seg.start_frame) +
                            " beyond the reference");
    }
    if (reference[next] != seg.label) {
      throw InvalidArgument("reference token " + std::to_string(next) + " '" +
                            reference[next] + "' differs from aligned '" +
                            seg.label + "' at frame " +
                            std::to_string(seg.start_frame));
    }
    out.push_back(reference[next++]);
  }
  if (next != reference.size()) {
    throw InvalidArgument("reference token " + std::to_string(next) + " '" +
                          reference[next] + "' missing from alignment");
  }
  return out;
}

}  // namespace

std::vector<std::string> InsertSilence(const std::vector<std::string>& reference,
                                       const Alignment& alignment,
                                       const LabelerConfig& config) {
  return Label(reference, alignment, config, nullptr);
}

Transcript InsertSilence(const Transcript& reference, const Alignment& alignment,
                         const LabelerConfig& config, const Vocab& vocab) {
  std::vector<std::string> tokens;
  for (int id : reference) {
    if (id == vocab.bos_id() || id == vocab.eos_id()) {
      throw InvalidArgument("reference must not contain BOS or EOS");
    }
    tokens.push_back(vocab.TokenOf(id));
  }
  return vocab.Encode(Label(tokens, alignment, config, nullptr));
}

std::vector<ReferenceEntry> LabelCorpus(
    const std::vector<ReferenceEntry>& references,
    const std::vector<std::pair<std::string, Alignment>>& alignments,
    const LabelerConfig& config, LabelStats* stats) {
  std::map<std::string, const Alignment*> by_id;
  for (const auto& [id, a] : alignments) by_id[id] = &a;
  std::vector<std::string> missing;
  for (const auto& r : references) {
    if (!by_id.count(r.utt_id)) missing.push_back(r.utt_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InvalidArgument("no alignment for utterance(s): " + list);
  }
  LabelStats local;
  std::vector<ReferenceEntry> out;
  for (const auto& r : references) {
    const int before = local.sil_inserted;
    try {
      out.push_back({r.utt_id, Label(r.tokens, *by_id[r.utt_id], config, &local)});
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(r.utt_id + ": " + e.what());
    }
    ++local.utterances;
    if (local.sil_inserted > before) ++local.changed;
  }
  if (stats != nullptr) *stats = local;
  return out;
}

}  // namespace olas
