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

#include <sstream>

#include <gtest/gtest.h>

#include "olas/core.h"
#include "test_util.h"

namespace olas {
namespace {

Vocab AbVocab() { return Vocab::WithSymbols({"a", "b", "c"}); }

TEST(VocabTest, ReservedTokensResolve) {
  const Vocab v = AbVocab();
  EXPECT_EQ(v.size(), 6);
  EXPECT_EQ(v.TokenOf(v.bos_id()), kBosToken);
  EXPECT_EQ(v.TokenOf(v.eos_id()), kEosToken);
  EXPECT_EQ(v.TokenOf(v.sil_id()), kSilToken);
  EXPECT_EQ(v.IdOfLabel("SIL"), v.sil_id());
  EXPECT_TRUE(v.IsSpeech(v.IdOf("b")));
  EXPECT_FALSE(v.IsSpeech(v.sil_id()));
}

TEST(VocabTest, RejectsBadInventories) {
  EXPECT_THROW(Vocab({"<bos>", "<eos>", "<sil>"}), InvalidArgument);
  EXPECT_THROW(Vocab({"<bos>", "<eos>", "<sil>", "a", "a"}), InvalidArgument);
  EXPECT_THROW(Vocab({"<bos>", "<eos>", "x", "a"}), InvalidArgument);
  EXPECT_THROW(Vocab({"<bos>", "<eos>", "<sil>", "SIL"}), InvalidArgument);
  EXPECT_THROW(AbVocab().IdOf("zz"), InvalidArgument);
}

TEST(VocabTest, FileRoundTrip) {
  const Vocab v = AbVocab();
  std::stringstream ss;
  WriteVocab(v, ss);
  EXPECT_EQ(ReadVocab(ss).tokens(), v.tokens());
}

TEST(MsToEncodedFramesTest, Examples) {
  EXPECT_EQ(MsToEncodedFrames(960, 10, 8), 12);
  EXPECT_EQ(MsToEncodedFrames(0, 10, 8), 0);
  EXPECT_EQ(MsToEncodedFrames(320, 10, 8), 4);
  EXPECT_EQ(MsToEncodedFrames(79, 10, 8), 0);
  EXPECT_THROW(MsToEncodedFrames(-1, 10, 8), InvalidArgument);
  EXPECT_THROW(MsToEncodedFrames(10, 0, 8), InvalidArgument);
}

TEST(StripNonScoringTest, Examples) {
  const Vocab v = AbVocab();
  const int a = v.IdOf("a"), b = v.IdOf("b");
  EXPECT_EQ(StripNonScoring(std::vector<int>{v.bos_id(), a, v.sil_id(), b, v.eos_id()}, v),
            (Transcript{a, b}));
  EXPECT_TRUE(StripNonScoring(std::vector<int>{}, v).empty());
  EXPECT_TRUE(StripNonScoring(std::vector<int>{v.sil_id(), v.sil_id()}, v).empty());
  EXPECT_THROW(StripNonScoring(std::vector<int>{99}, v), InvalidArgument);
}

TEST(AlignmentTest, ParsesContiguousSegments) {
  const Alignment al = ParseAlignment("a 0 50\nSIL 50 150\nb 150 200");
  ASSERT_EQ(al.segments().size(), 3u);
  EXPECT_EQ(al.num_frames(), 200);
  EXPECT_TRUE(al.segments()[1].is_silence());
  EXPECT_EQ(al.SpeechLabels(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(al.LastSpeechEndFrame(), 200);
}

TEST(AlignmentTest, RejectsOverlapsAndGaps) {
  EXPECT_THROW(ParseAlignment("a 0 50\nb 40 90"), ParseError);
  EXPECT_THROW(ParseAlignment("a 0 50\nb 60 90"), ParseError);
  EXPECT_THROW(ParseAlignment("a 5 50"), ParseError);
  EXPECT_THROW(ParseAlignment("a 0 0"), ParseError);
  EXPECT_THROW(ParseAlignment("a 0"), ParseError);
  EXPECT_THROW(ParseAlignment("a 0 x"), ParseError);
}

TEST(AlignmentTest, ErrorNamesLine) {
  try {
    ParseAlignment("a 0 50\n\nb 40 90\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(AlignmentTest, EmptyText) {
  const Alignment al = ParseAlignment("");
  EXPECT_TRUE(al.empty());
  EXPECT_EQ(al.num_frames(), 0);
  EXPECT_EQ(al.LastSpeechEndFrame(), -1);
}

TEST(AlignmentTest, RoundTripCanonicalizes) {
  const std::string canonical = "a 0 50\nSIL 50 150\nb 150 200\n";
  EXPECT_EQ(SerializeAlignment(ParseAlignment(canonical)), canonical);
  EXPECT_EQ(SerializeAlignment(ParseAlignment("  a 0   50\n\nSIL 50 150\n b 150 200")),
            canonical);
}

TEST(AlignmentTest, BlocksRoundTrip) {
  std::vector<std::pair<std::string, Alignment>> blocks = {
      {"u1", ParseAlignment("a 0 4\nSIL 4 9")},
      {"u2", ParseAlignment("SIL 0 3")}};
  std::stringstream ss;
  WriteAlignmentBlocks(blocks, ss);
  const auto back = ReadAlignmentBlocks(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].first, "u1");
  EXPECT_EQ(back[0].second, blocks[0].second);
  EXPECT_EQ(back[1].second, blocks[1].second);
}

TEST(FeaturesTest, RoundTripIsExact) {
  FeatureSequence f;
  f.frames = testing::RandomFrames(7, 3, 5);
  std::stringstream ss;
  WriteFeatures(f, ss);
  const FeatureSequence back = ReadFeatures(ss);
  EXPECT_EQ(back.frames, f.frames);
  EXPECT_EQ(back.frame_shift_ms, 10);
}

TEST(FeaturesTest, RejectsNonFinite) {
  FeatureSequence f;
  f.frames = Matrix::Zero(2, 2);
  f.frames(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ValidateFeatures(f), NumericError);
  std::stringstream truncated("2 10 25 3\n0 0\n");
  EXPECT_THROW(ReadFeatures(truncated), ParseError);
}

TEST(ReferencesTest, RoundTripAndMissingTab) {
  std::vector<ReferenceEntry> refs = {{"u1", {"a", "b"}}, {"u2", {}}};
  std::stringstream ss;
  WriteReferences(refs, ss);
  const auto back = ReadReferences(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].tokens, refs[0].tokens);
  EXPECT_TRUE(back[1].tokens.empty());
  std::stringstream bad("u1 a b\n");
  EXPECT_THROW(ReadReferences(bad), ParseError);
}

}  // namespace
}  // namespace olas
