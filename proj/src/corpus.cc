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

#include "olas/corpus.h"

#include <filesystem>
#include <fstream>
#include <map>

namespace olas {

namespace fs = std::filesystem;

namespace {

std::ifstream OpenIn(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

Corpus ReadCorpus(const std::string& dir, const std::string& text_name) {
  const fs::path root(dir);
  auto vin = OpenIn(root / "vocab.txt");
  Corpus corpus{ReadVocab(vin), {}};
  auto tin = OpenIn(root / text_name);
  std::map<std::string, Alignment> aligns;
  if (fs::exists(root / "align.txt")) {
    auto ain = OpenIn(root / "align.txt");
    for (auto& [id, a] : ReadAlignmentBlocks(ain)) aligns[id] = std::move(a);
  }
  for (auto& ref : ReadReferences(tin)) {
    for (const auto& t : ref.tokens) {
      if (!corpus.vocab.Contains(t)) {
        throw ParseError(ref.utt_id + ": token '" + t + "' not in vocab");
      }
    }
    CorpusEntry e;
    e.utt_id = ref.utt_id;
    e.tokens = std::move(ref.tokens);
    auto fin = OpenIn(root / "feats" / (e.utt_id + ".txt"));
    e.features = ReadFeatures(fin);
    if (auto it = aligns.find(e.utt_id); it != aligns.end()) {
      e.alignment = it->second;
    }
    corpus.entries.push_back(std::move(e));
  }
  return corpus;
}

void WriteCorpus(const std::string& dir, const Corpus& corpus) {
  const fs::path root(dir);
  fs::create_directories(root / "feats");
  auto vout = OpenOut(root / "vocab.txt");
  WriteVocab(corpus.vocab, vout);
  std::vector<ReferenceEntry> refs;
  std::vector<std::pair<std::string, Alignment>> aligns;
  for (const auto& e : corpus.entries) {
    refs.push_back({e.utt_id, e.tokens});
    if (e.alignment) aligns.emplace_back(e.utt_id, *e.alignment);
    auto fout = OpenOut(root / "feats" / (e.utt_id + ".txt"));
    WriteFeatures(e.features, fout);
  }
  auto tout = OpenOut(root / "text");
  WriteReferences(refs, tout);
  if (!aligns.empty()) {
    auto aout = OpenOut(root / "align.txt");
    WriteAlignmentBlocks(aligns, aout);
  }
}

}  // namespace olas
