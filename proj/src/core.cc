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

#include "olas/core.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace olas {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 4) {
    throw InvalidArgument("vocab needs at least 4 tokens, got " +
                          std::to_string(tokens_.size()));
  }
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) throw InvalidArgument("empty vocab entry at " + std::to_string(i));
    if (!id_of_.emplace(t, i).second) {
      throw InvalidArgument("duplicate vocab token '" + t + "'");
    }
  }
  auto reserved = [&](std::string_view name) {
    auto it = id_of_.find(std::string(name));
    if (it == id_of_.end()) {
      throw InvalidArgument("vocab lacks reserved token " + std::string(name));
    }
    return it->second;
  };
  bos_id_ = reserved(kBosToken);
  eos_id_ = reserved(kEosToken);
  sil_id_ = reserved(kSilToken);
  if (id_of_.count(std::string(kSilLabel)) > 0) {
    throw InvalidArgument("'SIL' is reserved for alignments");
  }
}

Vocab Vocab::WithSymbols(const std::vector<std::string>& symbols) {
  std::vector<std::string> tokens = {std::string(kBosToken),
                                     std::string(kEosToken),
                                     std::string(kSilToken)};
  tokens.insert(tokens.end(), symbols.begin(), symbols.end());
  return Vocab(std::move(tokens));
}

bool Vocab::Contains(std::string_view token) const {
  return id_of_.count(std::string(token)) > 0;
}

int Vocab::IdOf(std::string_view token) const {
  auto it = id_of_.find(std::string(token));
  if (it == id_of_.end()) {
    throw InvalidArgument("unknown token '" + std::string(token) + "'");
  }
  return it->second;
}

const std::string& Vocab::TokenOf(int id) const {
  if (!IsValid(id)) throw InvalidArgument("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

int Vocab::IdOfLabel(std::string_view label) const {
  if (label == kSilLabel) return sil_id_;
  return IdOf(label);
}

std::vector<int> Vocab::Encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(IdOf(t));
  return ids;
}

std::vector<std::string> Vocab::Decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(TokenOf(id));
  return out;
}

Vocab ReadVocab(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 1) throw ParseError("vocab line has spaces: '" + line + "'");
    tokens.push_back(fields[0]);
  }
  return Vocab(std::move(tokens));
}

void WriteVocab(const Vocab& vocab, std::ostream& out) {
  for (const auto& t : vocab.tokens()) out << t << '\n';
}

void ValidateFeatures(const FeatureSequence& features) {
  if (features.frame_shift_ms <= 0 || features.frame_window_ms <= 0) {
    throw InvalidArgument("frame shift and window must be positive");
  }
  if (!features.frames.allFinite()) {
    throw NumericError("feature matrix contains non-finite values");
  }
}

namespace {

double ParseDouble(std::string_view field, int line_no) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" +
                     std::string(field) + "'");
  }
  return value;
}

int ParseInt(std::string_view field, int line_no) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace

FeatureSequence ReadFeatures(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = SplitWhitespace(line);
  }
  if (header.size() != 4) {
    throw ParseError("feature header must be 'D frame_shift_ms frame_window_ms T'");
  }
  const int dim = ParseInt(header[0], line_no);
  FeatureSequence feats;
  feats.frame_shift_ms = ParseInt(header[1], line_no);
  feats.frame_window_ms = ParseInt(header[2], line_no);
  const int num_frames = ParseInt(header[3], line_no);
  if (dim <= 0 || num_frames < 0) throw ParseError("bad feature header dimensions");
  feats.frames.resize(num_frames, dim);
  for (int t = 0; t < num_frames; ++t) {
    if (!std::getline(in, line)) {
      throw ParseError("feature file truncated at row " + std::to_string(t));
    }
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (static_cast<int>(fields.size()) != dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " values");
    }
    for (int d = 0; d < dim; ++d) feats.frames(t, d) = ParseDouble(fields[d], line_no);
  }
  ValidateFeatures(feats);
  return feats;
}

void WriteFeatures(const FeatureSequence& features, std::ostream& out) {
  out << features.dim() << ' ' << features.frame_shift_ms << ' '
      << features.frame_window_ms << ' ' << features.num_frames() << '\n';
  std::ostringstream row;
  row << std::setprecision(17);
  for (int t = 0; t < features.num_frames(); ++t) {
    row.str("");
    for (int d = 0; d < features.dim(); ++d) {
      if (d > 0) row << ' ';
      row << features.frames(t, d);
    }
    out << row.str() << '\n';
  }
}

Alignment::Alignment(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  int expected_start = 0;
  for (size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    if (s.label.empty()) throw InvalidArgument("segment " + std::to_string(k) + " has no label");
    if (s.end_frame <= s.start_frame) {
      throw InvalidArgument("segment " + std::to_string(k) + " has end <= start");
    }
    if (s.start_frame != expected_start) {
      throw InvalidArgument("segment " + std::to_string(k) + " starts at " +
                            std::to_string(s.start_frame) + ", expected " +
                            std::to_string(expected_start));
    }
    expected_start = s.end_frame;
  }
}

std::vector<std::string> Alignment::SpeechLabels() const {
  std::vector<std::string> labels;
  for (const auto& s : segments_) {
    if (!s.is_silence()) labels.push_back(s.label);
  }
  return labels;
}

int Alignment::LastSpeechEndFrame() const {
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (!it->is_silence()) return it->end_frame;
  }
  return -1;
}

Alignment ParseAlignment(std::string_view text) {
  std::vector<Segment> segments;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int expected_start = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    const std::string where = "alignment line " + std::to_string(line_no);
    if (fields.size() != 3) throw ParseError(where + ": expected 'label start end'");
    Segment seg{fields[0], ParseInt(fields[1], line_no), ParseInt(fields[2], line_no)};
    if (seg.end_frame <= seg.start_frame) throw ParseError(where + ": end <= start");
    if (seg.start_frame < expected_start) throw ParseError(where + ": overlaps previous segment");
    if (seg.start_frame > expected_start) throw ParseError(where + ": gap before segment");
    expected_start = seg.end_frame;
    segments.push_back(std::move(seg));
  }
  return Alignment(std::move(segments));
}

std::string SerializeAlignment(const Alignment& alignment) {
  std::string out;
  for (const auto& s : alignment.segments()) {
    out += s.label + ' ' + std::to_string(s.start_frame) + ' ' +
           std::to_string(s.end_frame) + '\n';
  }
  return out;
}

Transcript StripNonScoring(std::span<const int> tokens, const Vocab& vocab) {
  Transcript out;
  out.reserve(tokens.size());
  for (int id : tokens) {
    if (!vocab.IsValid(id)) {
      throw InvalidArgument("token id " + std::to_string(id) + " not in vocab");
    }
    if (vocab.IsSpeech(id)) out.push_back(id);
  }
  return out;
}

int64_t MsToEncodedFrames(int64_t ms, int64_t frame_shift_ms,
                          int64_t total_reduction) {
  if (frame_shift_ms <= 0) throw InvalidArgument("frame_shift_ms must be positive");
  if (total_reduction <= 0) throw InvalidArgument("total_reduction must be positive");
  if (ms < 0) throw InvalidArgument("duration must be non-negative");
  return ms / (frame_shift_ms * total_reduction);
}

std::vector<ReferenceEntry> ReadReferences(std::istream& in) {
  std::vector<ReferenceEntry> refs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SplitWhitespace(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("reference line " + std::to_string(line_no) + ": missing tab");
    }
    ReferenceEntry entry;
    entry.utt_id = line.substr(0, tab);
    if (entry.utt_id.empty()) {
      throw ParseError("reference line " + std::to_string(line_no) + ": empty id");
    }
    entry.tokens = SplitWhitespace(std::string_view(line).substr(tab + 1));
    refs.push_back(std::move(entry));
  }
  return refs;
}

void WriteReferences(const std::vector<ReferenceEntry>& refs,
                     std::ostream& out) {
  for (const auto& r : refs) {
    out << r.utt_id << '\t';
    for (size_t i = 0; i < r.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << r.tokens[i];
    }
    out << '\n';
  }
}

std::vector<std::pair<std::string, Alignment>> ReadAlignmentBlocks(
    std::istream& in) {
  std::vector<std::pair<std::string, Alignment>> blocks;
  std::string line;
  std::string current_id;
  std::string body;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    try {
      blocks.emplace_back(current_id, ParseAlignment(body));
    } catch (const ParseError& e) {
      throw ParseError("utterance " + current_id + ": " + e.what());
    }
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      flush();
      auto fields = SplitWhitespace(std::string_view(line).substr(1));
      if (fields.size() != 1) throw ParseError("bad alignment block header '" + line + "'");
      current_id = fields[0];
      body.clear();
      open = true;
      continue;
    }
    if (!open) {
      if (SplitWhitespace(line).empty()) continue;
      throw ParseError("alignment segment outside a '# utt_id' block");
    }
    body += line;
    body += '\n';
  }
  flush();
  return blocks;
}

void WriteAlignmentBlocks(
    const std::vector<std::pair<std::string, Alignment>>& blocks,
    std::ostream& out) {
  for (const auto& [id, alignment] : blocks) {
    out << "# " << id << '\n' << SerializeAlignment(alignment);
  }
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string ReadFileToString(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace olas
