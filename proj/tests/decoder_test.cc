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

#include <cmath>

#include <gtest/gtest.h>

#include "olas/decoder.h"
#include "olas/labeler.h"
#include "olas/synth.h"
#include "test_util.h"

namespace olas {
namespace {

// Attends to the last frame and always prefers the first speech token, so
// it never chooses EOS on its own.
class BabblingModel : public Model {
 public:
  BabblingModel()
      : vocab_(Vocab::WithSymbols({"a", "b"})),
        encoder_(Config(), EncoderParams::Zeros(Config())) {}

  const Vocab& vocab() const override { return vocab_; }
  const Encoder& encoder() const override { return encoder_; }
  DecoderState InitialState() const override {
    return {Vector::Zero(1), Vector::Zero(1)};
  }
  StepOutput Step(const DecoderState& prev, int, const EncodedBuffer& buffer,
                  const AttentionState& attention, bool force) const override {
    StepOutput out;
    out.next = prev;
    out.attention = HardChunkSelect(
        buffer.size(), attention.prev_index, 1,
        [&](int t) { return t == buffer.size() - 1 ? 1.0 : 0.0; },
        [](int) { return 0.0; }, force);
    if (!out.attention.selected()) return out;
    out.log_probs = Vector::Constant(vocab_.size(), std::log(0.01));
    out.log_probs[vocab_.IdOf("a")] = std::log(0.97);
    return out;
  }

 private:
  static EncoderConfig Config() {
    EncoderConfig c;
    c.num_layers = 1;
    c.input_dim = 2;
    c.hidden_units = 1;
    c.projection_dim = 1;
    return c;
  }
  Vocab vocab_;
  Encoder encoder_;
};

FeatureSequence Frames(int t, int dim, uint64_t seed) {
  FeatureSequence f;
  f.frames = testing::RandomFrames(t, dim, seed);
  return f;
}

double TimelineSum(const Hypothesis& h) {
  double s = 0.0;
  for (const auto& e : h.timeline) s += e.log_prob;
  return s;
}

void ExpectMonotone(const Hypothesis& h) {
  for (size_t k = 1; k < h.timeline.size(); ++k) {
    EXPECT_GE(h.timeline[k].selected_index, h.timeline[k - 1].selected_index);
  }
}

TEST(BeamConfigTest, Validation) {
  BeamConfig c;
  c.beam_size = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  EXPECT_EQ(BeamConfig().MaxTokens(10), 28);
  EXPECT_EQ(ParseEosPolicy("restart"), EosPolicy::kRestart);
  EXPECT_EQ(EosPolicyName(EosPolicy::kAccept), "accept");
  EXPECT_THROW(ParseEosPolicy("later"), InvalidArgument);
}

TEST(DecoderTest, GreedyOracleEmitsScriptedTokens) {
  SynthConfig sc;
  const Matrix patterns = SynthPatterns(sc);
  auto u = GenUtterance(sc, patterns, 1, {"c", "a", "d"}, {{1, 40}, {3, 16}});
  OracleConfig oc;
  auto oracle = std::make_shared<OracleModel>(SynthVocab(sc), oc, sc.feature_dim,
                                              u.alignment);
  BeamConfig bc;
  bc.beam_size = 1;
  DecodeResult r = DecodeOffline(*oracle, u.features, bc);
  std::vector<int> want = {oracle->vocab().bos_id()};
  for (int t : oracle->emission_tokens()) want.push_back(t);
  want.push_back(oracle->vocab().eos_id());
  EXPECT_EQ(r.tokens, want);
}

TEST(DecoderTest, SilenceCountFollowsLabelerRule) {
  // "a", 100 silence frames, "b" at R = 4; one SIL per 20 input frames.
  SynthConfig sc;
  auto u = GenUtterance(sc, SynthPatterns(sc), 2, {"a", "b"}, {{1, 100}});
  OracleConfig oc;
  oc.num_layers = 2;
  oc.sil_duration_encoded = 5;
  auto oracle = std::make_shared<OracleModel>(SynthVocab(sc), oc, sc.feature_dim,
                                              u.alignment);
  DecodeResult r = DecodeOffline(*oracle, u.features, BeamConfig());
  LabelerConfig lc;
  lc.duration_frames = 20;
  const Vocab& v = oracle->vocab();
  std::vector<int> want = {v.bos_id()};
  for (const auto& t : InsertSilence(u.tokens, u.alignment, lc)) want.push_back(v.IdOf(t));
  want.push_back(v.eos_id());
  EXPECT_EQ(r.tokens, want);
  EXPECT_EQ(std::count(r.tokens.begin(), r.tokens.end(), v.sil_id()), 5);
}

TEST(DecoderTest, ZeroLengthUtterance) {
  const Vocab v = Vocab::WithSymbols({"a", "b"});
  auto model = testing::RandomLas(v, testing::SmallLas(3, 2, 4), 1);
  DecodeResult r = DecodeOffline(*model, Frames(0, 3, 1), BeamConfig());
  EXPECT_EQ(r.tokens, (std::vector<int>{v.bos_id(), v.eos_id()}));
}

TEST(DecoderTest, DeterministicAndAdditive) {
  const Vocab v = Vocab::WithSymbols({"a", "b", "c"});
  auto model = testing::RandomLas(v, testing::SmallLas(3, 2, 6), 2);
  BeamConfig bc;
  bc.beam_size = 1;
  const auto f = Frames(40, 3, 3);
  DecodeResult a = DecodeOffline(*model, f, bc);
  DecodeResult b = DecodeOffline(*model, f, bc);
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_EQ(a.best.log_score, b.best.log_score);
  EXPECT_NEAR(a.best.log_score, TimelineSum(a.best), 1e-9);
  EXPECT_EQ(a.tokens.front(), v.bos_id());
  EXPECT_EQ(a.tokens.back(), v.eos_id());
  ExpectMonotone(a.best);
}

TEST(DecoderTest, WiderBeamNeverScoresWorse) {
  const Vocab v = Vocab::WithSymbols({"a", "b", "c"});
  BeamConfig narrow, wide;
  narrow.beam_size = 1;
  wide.beam_size = 8;
  for (int k = 0; k < 50; ++k) {
    auto model = testing::RandomLas(v, testing::SmallLas(3, 2, 5), 100 + k);
    const auto f = Frames(10 + k % 17, 3, 500 + k);
    const DecodeResult n = DecodeOffline(*model, f, narrow);
    const DecodeResult w = DecodeOffline(*model, f, wide);
    EXPECT_GE(w.best.log_score, n.best.log_score - 1e-12) << k;
    ExpectMonotone(w.best);
  }
}

TEST(DecoderTest, TokenCapClosesRunawayHypothesis) {
  BabblingModel model;
  BeamConfig bc;
  bc.beam_size = 2;
  const auto f = Frames(6, 2, 4);  // T' = 3, cap = 14
  DecodeResult r = DecodeOffline(model, f, bc);
  EXPECT_EQ(r.best.num_emitted(), bc.MaxTokens(3) + 1);
  EXPECT_EQ(r.tokens.back(), model.vocab().eos_id());
  EXPECT_TRUE(r.best.runaway());
  bool logged = false;
  for (const auto& rec : r.trace) logged = logged || rec["event"] == "runaway";
  EXPECT_TRUE(logged);
}

TEST(DecodeStepTest, StallsOnIncompleteBufferAtCap) {
  BabblingModel model;
  BeamConfig bc;
  bc.cap_base = 1;
  bc.cap_per_frame = 0;
  EncodedBuffer buffer(2, 10);
  buffer.Append({Vector::Zero(1), Vector::Zero(1)});
  std::vector<Hypothesis> beam = {InitialHypothesis(model)};
  BeamStep s1 = DecodeStep(model, beam, buffer, false, bc);
  EXPECT_FALSE(s1.any_exhausted);
  BeamStep s2 = DecodeStep(model, {s1.beam.front()}, buffer, false, bc);
  EXPECT_TRUE(s2.any_exhausted);
  EXPECT_TRUE(s2.beam.front().stalled);
  EXPECT_FALSE(s2.beam.front().finished);
}

TEST(DecodeStepTest, ExhaustedAttentionStalls) {
  SynthConfig sc;
  auto u = GenUtterance(sc, SynthPatterns(sc), 3, {"a", "b"}, {{1, 64}});
  OracleConfig oc;
  oc.mode = OracleMode::kSilenceSkipping;
  OracleModel oracle(SynthVocab(sc), oc, sc.feature_dim, u.alignment);
  EncodedBuffer buffer(4, 10);
  buffer.Append({Vector::Zero(1)});  // half of "a"
  BeamStep s = DecodeStep(oracle, {InitialHypothesis(oracle)}, buffer, false, BeamConfig());
  EXPECT_TRUE(s.any_exhausted);
  ASSERT_EQ(s.beam.size(), 1u);
  EXPECT_TRUE(s.beam.front().stalled);
  EXPECT_THROW(DecodeStep(oracle, {}, buffer, false, BeamConfig()), InvalidArgument);
}

}  // namespace
}  // namespace olas
