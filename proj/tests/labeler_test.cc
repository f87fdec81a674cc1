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

#include <gtest/gtest.h>

#include "olas/labeler.h"
#include "olas/synth.h"

namespace olas {
namespace {

const std::string kSil(kSilToken);

LabelerConfig Config(int n, int min_segment = -1) {
  LabelerConfig c;
  c.duration_frames = n;
  c.min_segment_frames = min_segment;
  return c;
}

std::vector<std::pair<std::string, Alignment>> Fixture() {
  return {{"u1", ParseAlignment("a 0 10\nSIL 10 58\nb 58 70")},
          {"u2", ParseAlignment("c 0 10\nb 10 20")},
          {"u3", ParseAlignment("SIL 0 30\na 30 40\nSIL 40 45")}};
}

std::vector<ReferenceEntry> FixtureRefs() {
  return {{"u1", {"a", "b"}}, {"u2", {"c", "b"}}, {"u3", {"a"}}};
}

TEST(LabelerTest, TwoSilencesForFortyEightFrames) {
  const Alignment al = ParseAlignment("a 0 10\nSIL 10 58\nb 58 70");
  EXPECT_EQ(InsertSilence({"a", "b"}, al, Config(24)),
            (std::vector<std::string>{"a", kSil, kSil, "b"}));
}

TEST(LabelerTest, NoSilenceLeavesReferenceUnchanged) {
  const Alignment al = ParseAlignment("a 0 10\nb 10 20");
  EXPECT_EQ(InsertSilence({"a", "b"}, al, Config(24)),
            (std::vector<std::string>{"a", "b"}));
}

TEST(LabelerTest, CountRule) {
  EXPECT_EQ(SilenceTokenCount(30, Config(24, 12)), 1);
  EXPECT_EQ(SilenceTokenCount(12, Config(24, 12)), 1);
  EXPECT_EQ(SilenceTokenCount(11, Config(24, 12)), 0);
  EXPECT_EQ(SilenceTokenCount(11, Config(24)), 0);
  EXPECT_EQ(SilenceTokenCount(12, Config(24)), 1);
  EXPECT_EQ(SilenceTokenCount(72, Config(24)), 3);
  EXPECT_EQ(SilenceTokenCount(0, Config(24, 0)), 0);
}

TEST(LabelerTest, LeadingAndTrailingSilence) {
  const auto blocks = Fixture();
  EXPECT_EQ(InsertSilence({"a"}, blocks[2].second, Config(24)),
            (std::vector<std::string>{kSil, "a"}));
  EXPECT_EQ(InsertSilence({"a"}, blocks[2].second, Config(10)),
            (std::vector<std::string>{kSil, kSil, kSil, "a", kSil}));
}

TEST(LabelerTest, Errors) {
  const Alignment al = ParseAlignment("a 0 10\nSIL 10 58\nb 58 70");
  EXPECT_THROW(InsertSilence({"a", kSil, "b"}, al, Config(24)), InvalidArgument);
  EXPECT_THROW(InsertSilence({"a", "c"}, al, Config(24)), InvalidArgument);
  EXPECT_THROW(InsertSilence({"a"}, al, Config(24)), InvalidArgument);
  EXPECT_THROW(InsertSilence({"a", "b", "c"}, al, Config(24)), InvalidArgument);
  EXPECT_THROW(InsertSilence({"a", "b"}, al, Config(0)), InvalidArgument);
  try {
    InsertSilence({"a", "c"}, al, Config(24));
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("frame 58"), std::string::npos);
  }
}

TEST(LabelerTest, IdFormAgreesAndStripsBack) {
  const Vocab v = Vocab::WithSymbols({"a", "b", "c"});
  const auto blocks = Fixture();
  const auto refs = FixtureRefs();
  for (size_t k = 0; k < refs.size(); ++k) {
    const Transcript ref = v.Encode(refs[k].tokens);
    const Transcript labeled = InsertSilence(ref, blocks[k].second, Config(8), v);
    EXPECT_EQ(labeled, v.Encode(InsertSilence(refs[k].tokens, blocks[k].second, Config(8))));
    EXPECT_EQ(StripNonScoring(labeled, v), ref);
  }
  EXPECT_THROW(InsertSilence(Transcript{v.bos_id()}, blocks[1].second, Config(8), v),
               InvalidArgument);
}

TEST(LabelCorpusTest, EmptyCorpus) {
  LabelStats stats;
  stats.changed = 7;
  EXPECT_TRUE(LabelCorpus({}, {}, Config(24), &stats).empty());
  EXPECT_EQ(stats.utterances, 0);
  EXPECT_EQ(stats.changed, 0);
  EXPECT_EQ(stats.sil_inserted, 0);
}

TEST(LabelCorpusTest, OnlyUtterancesWithSilenceChange) {
  LabelStats stats;
  const auto out = LabelCorpus(FixtureRefs(), Fixture(), Config(24), &stats);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(stats.utterances, 3);
  EXPECT_EQ(stats.changed, 2);
  EXPECT_EQ(stats.sil_inserted, 3);
  EXPECT_EQ(stats.segments_labeled, 2);
  EXPECT_EQ(stats.segments_skipped, 1);
  EXPECT_EQ(out[1].tokens, FixtureRefs()[1].tokens);
}

TEST(LabelCorpusTest, HalvingDurationNeverReducesSilCount) {
  for (int n : {48, 24, 12, 6, 3}) {
    LabelStats coarse, fine;
    LabelCorpus(FixtureRefs(), Fixture(), Config(n), &coarse);
    LabelCorpus(FixtureRefs(), Fixture(), Config(n / 2 > 0 ? n / 2 : 1), &fine);
    EXPECT_GE(fine.sil_inserted, coarse.sil_inserted) << n;
  }
}

TEST(LabelCorpusTest, MissingAlignmentListsIds) {
  auto refs = FixtureRefs();
  refs.push_back({"u9", {"a"}});
  try {
    LabelCorpus(refs, Fixture(), Config(24), nullptr);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("u9"), std::string::npos);
  }
}

TEST(LabelCorpusTest, ErrorsNameTheUtterance) {
  auto refs = FixtureRefs();
  refs[1].tokens = {"c", "a"};
  try {
    LabelCorpus(refs, Fixture(), Config(24), nullptr);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("u2:", 0), 0u);
  }
}

TEST(LabelerPropertyTest, StripInvertsInsertOnSyntheticCorpus) {
  SynthConfig sc;
  LayoutSpec layout;
  layout.lead_max = 40;
  layout.trail_max = 40;
  layout.mid_count_max = 2;
  layout.mid_max = 90;
  Corpus c = GenCorpus(sc, layout, 40, 3);
  for (const auto& e : c.entries) {
    for (int n : {5, 24}) {
      const Transcript ref = c.vocab.Encode(e.tokens);
      const Transcript lab = InsertSilence(ref, *e.alignment, Config(n), c.vocab);
      EXPECT_EQ(StripNonScoring(lab, c.vocab), ref);
    }
  }
}

}  // namespace
}  // namespace olas
