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

// On-disk corpus directory:
//
//   vocab.txt        one token per line
//   text             utt_id<TAB>tokens (clean references)
//   align.txt        optional, "# utt_id" blocks of alignment lines
//   feats/<id>.txt   feature file per utterance
//
// Alternative reference files (e.g. silence-labeled ones) sit next to `text`.

#ifndef OLAS_CORPUS_H_
#define OLAS_CORPUS_H_

#include <optional>
#include <string>
#include <vector>

#include "olas/core.h"

namespace olas {

struct CorpusEntry {
  std::string utt_id;
  FeatureSequence features;
  std::vector<std::string> tokens;
  std::optional<Alignment> alignment;
};

struct Corpus {
  Vocab vocab;
  std::vector<CorpusEntry> entries;
};

Corpus ReadCorpus(const std::string& dir, const std::string& text_name = "text");
void WriteCorpus(const std::string& dir, const Corpus& corpus);

}  // namespace olas

#endif  // OLAS_CORPUS_H_
