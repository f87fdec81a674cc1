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

// Silence labeling: one SIL token per `duration_frames` frames of aligned
// silence, inserted where the silence occurs in the reference.

#ifndef OLAS_LABELER_H_
#define OLAS_LABELER_H_

#include <string>
#include <utility>
#include <vector>

#include "olas/core.h"

namespace olas {

struct LabelerConfig {
  int duration_frames = 24;
  int min_segment_frames = -1;  // negative means duration_frames / 2

  int MinSegmentFrames() const {
    return min_segment_frames < 0 ? duration_frames / 2 : min_segment_frames;
  }
  void Validate() const;
};

// Number of SIL tokens for a silence segment of `length` frames.
int SilenceTokenCount(int length, const LabelerConfig& config);

// String form. Throws InvalidArgument when the reference already holds SIL
// tokens or its tokens differ from the alignment's speech labels.
std::vector<std::string> InsertSilence(const std::vector<std::string>& reference,
                                       const Alignment& alignment,
                                       const LabelerConfig& config);

Transcript InsertSilence(const Transcript& reference, const Alignment& alignment,
                         const LabelerConfig& config, const Vocab& vocab);

struct LabelStats {
  int utterances = 0;
  int changed = 0;           // utterances that received at least one SIL
  int sil_inserted = 0;
  int segments_labeled = 0;
  int segments_skipped = 0;  // silence segments below the minimum length
};

// Labels every reference with the alignment of the same id. Throws
// InvalidArgument listing ids that have no alignment.
std::vector<ReferenceEntry> LabelCorpus(
    const std::vector<ReferenceEntry>& references,
    const std::vector<std::pair<std::string, Alignment>>& alignments,
    const LabelerConfig& config, LabelStats* stats);

}  // namespace olas

#endif  // OLAS_LABELER_H_
