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

// Shared domain types: vocabulary, feature sequences, alignments, transcripts,
// and their text file formats.

#ifndef OLAS_CORE_H_
#define OLAS_CORE_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace olas {

// Error categories. Everything thrown by the library derives from one of
// these so callers can distinguish bad input from bad state.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";
inline constexpr std::string_view kSilToken = "<sil>";
// Label used for silence segments inside alignment files.
inline constexpr std::string_view kSilLabel = "SIL";

// Token inventory. Ids are dense in [0, size()).
class Vocab {
 public:
  // Throws InvalidArgument on duplicates, missing reserved tokens or
  // fewer than four entries.
  explicit Vocab(std::vector<std::string> tokens);

  // Reserved tokens first, then `symbols` in order.
  static Vocab WithSymbols(const std::vector<std::string>& symbols);

  int size() const { return static_cast<int>(tokens_.size()); }
  int bos_id() const { return bos_id_; }
  int eos_id() const { return eos_id_; }
  int sil_id() const { return sil_id_; }

  bool Contains(std::string_view token) const;
  bool IsValid(int id) const { return id >= 0 && id < size(); }
  // True for ids that carry transcript content (not BOS/EOS/SIL).
  bool IsSpeech(int id) const {
    return IsValid(id) && id != bos_id_ && id != eos_id_ && id != sil_id_;
  }

  int IdOf(std::string_view token) const;  // InvalidArgument if unknown
  const std::string& TokenOf(int id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Maps alignment labels to ids; "SIL" maps to sil_id().
  int IdOfLabel(std::string_view label) const;

  std::vector<int> Encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> Decode(std::span<const int> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> id_of_;
  int bos_id_ = -1;
  int eos_id_ = -1;
  int sil_id_ = -1;
};

Vocab ReadVocab(std::istream& in);
void WriteVocab(const Vocab& vocab, std::ostream& out);

// T x D acoustic features plus frame timing.
struct FeatureSequence {
  Matrix frames;  // rows are frames
  int frame_shift_ms = 10;
  int frame_window_ms = 25;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int dim() const { return static_cast<int>(frames.cols()); }
  double duration_ms() const {
    return static_cast<double>(num_frames()) * frame_shift_ms;
  }
};

// Throws NumericError on non-finite values, InvalidArgument on bad timing.
void ValidateFeatures(const FeatureSequence& features);

FeatureSequence ReadFeatures(std::istream& in);
void WriteFeatures(const FeatureSequence& features, std::ostream& out);

struct Segment {
  std::string label;  // token string or kSilLabel
  int start_frame = 0;
  int end_frame = 0;  // exclusive

  bool is_silence() const { return label == kSilLabel; }
  int length() const { return end_frame - start_frame; }
  bool operator==(const Segment&) const = default;
};

// Contiguous segmentation of [0, T) in 10ms feature frames.
class Alignment {
 public:
  Alignment() = default;
  // Throws InvalidArgument when segments are not contiguous from 0.
  explicit Alignment(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  int num_frames() const {
    return segments_.empty() ? 0 : segments_.back().end_frame;
  }
  bool empty() const { return segments_.empty(); }
  // Non-silence labels in order.
  std::vector<std::string> SpeechLabels() const;
  // End frame of the final non-silence segment, or -1 if there is none.
  int LastSpeechEndFrame() const;

  bool operator==(const Alignment&) const = default;

 private:
  std::vector<Segment> segments_;
};

// Parses `label start end` lines. Blank lines are ignored. Errors carry the
// 1-based line number.
Alignment ParseAlignment(std::string_view text);
std::string SerializeAlignment(const Alignment& alignment);

// Token ids without BOS/EOS.
using Transcript = std::vector<int>;

// Drops BOS, EOS and SIL. Throws InvalidArgument on ids outside the vocab.
Transcript StripNonScoring(std::span<const int> tokens, const Vocab& vocab);

// floor(ms / (frame_shift_ms * total_reduction)).
int64_t MsToEncodedFrames(int64_t ms, int64_t frame_shift_ms,
                          int64_t total_reduction);

// Reference files: `utt_id<TAB>space separated tokens` per line.
struct ReferenceEntry {
  std::string utt_id;
  std::vector<std::string> tokens;
};
std::vector<ReferenceEntry> ReadReferences(std::istream& in);
void WriteReferences(const std::vector<ReferenceEntry>& refs,
                     std::ostream& out);

// Per-utterance alignment blocks, each introduced by `# utt_id`.
std::vector<std::pair<std::string, Alignment>> ReadAlignmentBlocks(
    std::istream& in);
void WriteAlignmentBlocks(
    const std::vector<std::pair<std::string, Alignment>>& blocks,
    std::ostream& out);

std::vector<std::string> SplitWhitespace(std::string_view text);
std::string ReadFileToString(const std::string& path);

}  // namespace olas

#endif  // OLAS_CORE_H_
