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
#include <filesystem>

#include <gtest/gtest.h>

#include "olas/trainer.h"
#include "test_util.h"

namespace olas {
namespace {

const Vocab& ToyVocab() {
  static const Vocab v = Vocab::WithSymbols({"a", "b", "c"});
  return v;
}

// The gradient-check model: D = 4, hidden 8, T = 12, three tokens.
struct GradFixture {
  LasConfig config = testing::SmallLas(4, 2, 8);
  ModelParams params = ModelParams::Random(config, ToyVocab().size(), 21);
  Matrix frames = testing::RandomFrames(12, 4, 22);
  std::vector<int> target = {ToyVocab().bos_id(), ToyVocab().IdOf("a"),
                             ToyVocab().IdOf("c"), ToyVocab().IdOf("b"),
                             ToyVocab().eos_id()};
};

double MaxAbs(const ModelParams& p) {
  double m = 0.0;
  p.ForEachTensor([&](const std::string&, const Matrix& t) {
    if (t.size() > 0) m = std::max(m, t.cwiseAbs().maxCoeff());
  });
  return m;
}

double MaxDiff(const ModelParams& a, const ModelParams& b) {
  ModelParams d = a;
  d.AddScaled(b, -1.0);
  return MaxAbs(d);
}

TEST(TrainerTest, SmoothedTarget) {
  const Vector q = SmoothedTarget(2, 4, 0.2);
  EXPECT_DOUBLE_EQ(q[2], 0.85);
  EXPECT_DOUBLE_EQ(q[0], 0.05);
  EXPECT_DOUBLE_EQ(q.sum(), 1.0);
  EXPECT_EQ(SmoothedTarget(1, 4, 0.0), Vector::Unit(4, 1));
  EXPECT_THROW(SmoothedTarget(4, 4, 0.1), InvalidArgument);
}

TEST(TrainerTest, PerfectPredictionHasZeroLossAndGradient) {
  GradFixture f;
  f.params.SetZero();
  f.params.output.b(ToyVocab().eos_id(), 0) = 60.0;
  const std::vector<int> target = {ToyVocab().bos_id(), ToyVocab().eos_id()};
  ForwardCache cache;
  const double loss = ForwardLoss(f.params, f.config, f.frames, target, {}, nullptr, &cache);
  EXPECT_NEAR(loss, 0.0, 1e-12);
  ModelParams grad = ModelParams::Zeros(f.config, ToyVocab().size());
  Backward(f.params, f.config, &cache, &grad);
  EXPECT_LE(MaxAbs(grad), 1e-8);
}

TEST(TrainerTest, GradientCheckEveryTensor) {
  GradFixture f;
  const auto results = GradientCheck(f.params, f.config, f.frames, f.target, 0.2, 1e-4);
  std::set<std::string> groups;
  for (const auto& r : results) {
    EXPECT_LE(r.max_rel_error, 1e-3) << r.tensor;
    EXPECT_GT(r.checked, 0) << r.tensor;
    groups.insert(r.tensor.substr(0, r.tensor.find('.')));
  }
  EXPECT_EQ(groups, (std::set<std::string>{"encoder", "attention", "decoder", "output"}));
}

TEST(TrainerTest, StaleCacheIsRejected) {
  GradFixture f;
  ModelParams grad = ModelParams::Zeros(f.config, ToyVocab().size());
  ForwardCache cache;
  EXPECT_FALSE(cache.valid());
  EXPECT_THROW(Backward(f.params, f.config, &cache, &grad), StateError);
  ForwardLoss(f.params, f.config, f.frames, f.target, {}, nullptr, &cache);
  EXPECT_TRUE(cache.valid());
  ModelParams changed = f.params;
  changed.output.b(0, 0) += 1e-3;
  EXPECT_THROW(Backward(changed, f.config, &cache, &grad), StateError);
  Backward(f.params, f.config, &cache, &grad);
  EXPECT_FALSE(cache.valid());
  EXPECT_THROW(Backward(f.params, f.config, &cache, &grad), StateError);
}

TEST(TrainerTest, ScheduledSamplingNeedsRng) {
  GradFixture f;
  EXPECT_THROW(ForwardLoss(f.params, f.config, f.frames, f.target, {0.0, 0.5}, nullptr,
                           nullptr),
               InvalidArgument);
}

TEST(TrainerTest, SelectionNoiseNeedsRngAndKeepsGradientExact) {
  GradFixture f;
  const LossOptions opt{0.2, 0.0, 1.0};
  EXPECT_THROW(ForwardLoss(f.params, f.config, f.frames, f.target, opt, nullptr, nullptr),
               InvalidArgument);
  // A fixed seed fixes the noise draw, so the loss is a smooth function of params.
  auto loss_at = [&](const ModelParams& p, ForwardCache* cache) {
    std::mt19937_64 rng(5);
    return ForwardLoss(p, f.config, f.frames, f.target, opt, &rng, cache);
  };
  ForwardCache cache;
  const double base = loss_at(f.params, &cache);
  EXPECT_NE(base, ForwardLoss(f.params, f.config, f.frames, f.target, {0.2, 0.0}, nullptr,
                              nullptr));
  ModelParams grad = ModelParams::Zeros(f.config, ToyVocab().size());
  Backward(f.params, f.config, &cache, &grad);
  const double h = 1e-5;
  for (int k = 0; k < 2; ++k) {
    ModelParams plus = f.params, minus = f.params;
    double* pp = k == 0 ? &plus.attention.sel_bias(0, 0) : &plus.attention.sel_out(1, 0);
    double* pm = k == 0 ? &minus.attention.sel_bias(0, 0) : &minus.attention.sel_out(1, 0);
    *pp += h;
    *pm -= h;
    const double fd = (loss_at(plus, nullptr) - loss_at(minus, nullptr)) / (2 * h);
    const double an = k == 0 ? grad.attention.sel_bias(0, 0) : grad.attention.sel_out(1, 0);
    EXPECT_NEAR(an, fd, 1e-6 + 1e-4 * std::abs(fd)) << k;
  }
}

TEST(TrainerTest, BatchReductionIsLinear) {
  GradFixture f;
  const TrainExample ex{"x", f.frames, f.target};
  const LossOptions opt{0.1, 0.0};
  auto grad_of = [&](std::vector<const TrainExample*> batch, Reduction red, double* loss) {
    ModelParams g = ModelParams::Zeros(f.config, ToyVocab().size());
    std::vector<int> ids(batch.size(), 0);
    *loss = BatchGradient(f.params, f.config, batch, opt, 1, 1, ids, red, 1, &g);
    return g;
  };
  double l1, l2, l3;
  const ModelParams one = grad_of({&ex}, Reduction::kMean, &l1);
  const ModelParams mean2 = grad_of({&ex, &ex}, Reduction::kMean, &l2);
  const ModelParams sum2 = grad_of({&ex, &ex}, Reduction::kSum, &l3);
  EXPECT_LE(MaxDiff(one, mean2), 1e-12);
  EXPECT_NEAR(l1, l2, 1e-12);
  ModelParams twice = one;
  twice.AddScaled(one, 1.0);
  EXPECT_LE(MaxDiff(twice, sum2), 1e-12);
  EXPECT_NEAR(2 * l1, l3, 1e-12);
}

TEST(TrainerTest, ThreadCountDoesNotChangeGradient) {
  GradFixture f;
  std::vector<TrainExample> exs;
  for (int k = 0; k < 5; ++k) {
    exs.push_back({"x", testing::RandomFrames(10 + k, 4, 40 + k), f.target});
  }
  std::vector<const TrainExample*> batch;
  for (const auto& e : exs) batch.push_back(&e);
  const std::vector<int> ids = {0, 1, 2, 3, 4};
  ModelParams g1 = ModelParams::Zeros(f.config, ToyVocab().size());
  ModelParams g3 = g1;
  const LossOptions opt{0.2, 0.5};
  const double a = BatchGradient(f.params, f.config, batch, opt, 9, 2, ids, Reduction::kMean, 1, &g1);
  const double b = BatchGradient(f.params, f.config, batch, opt, 9, 2, ids, Reduction::kMean, 3, &g3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(MaxDiff(g1, g3), 0.0);
}

TEST(TrainerTest, CheckpointRoundTripIsBitExact) {
  GradFixture f;
  Checkpoint ck{ToyVocab(), f.config, f.params, {{"epoch", 3}}};
  const std::string text = SerializeCheckpoint(ck);
  const Checkpoint back = ParseCheckpoint(text);
  EXPECT_EQ(back.vocab.tokens(), ToyVocab().tokens());
  EXPECT_EQ(back.meta["epoch"], 3);
  EXPECT_EQ(MaxDiff(back.params, f.params), 0.0);
  EXPECT_EQ(ForwardLoss(back.params, back.config, f.frames, f.target, {0.2, 0.0}, nullptr, nullptr),
            ForwardLoss(f.params, f.config, f.frames, f.target, {0.2, 0.0}, nullptr, nullptr));
  EXPECT_EQ(SerializeCheckpoint(back), text);

  const auto path = std::filesystem::temp_directory_path() / "olas_trainer_test.ckpt";
  SaveCheckpoint(ck, path.string());
  EXPECT_EQ(MaxDiff(LoadCheckpoint(path.string()).params, f.params), 0.0);
  std::filesystem::remove(path);
}

TEST(TrainerTest, CorruptCheckpointIsRejected) {
  GradFixture f;
  std::string text = SerializeCheckpoint({ToyVocab(), f.config, f.params, {}});
  const size_t pos = text.find("tensor ") + 40;
  text[pos] = text[pos] == '1' ? '2' : '1';
  EXPECT_THROW(ParseCheckpoint(text), ParseError);
  EXPECT_THROW(ParseCheckpoint("olas-checkpoint 1\n"), ParseError);
}

TEST(TrainerTest, ZeroEpochsLeavesParamsUnchanged) {
  GradFixture f;
  TrainConfig tc;
  tc.epochs = 0;
  const TrainResult r = Train(f.params, f.config, ToyVocab(), {}, {}, tc);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(MaxDiff(r.params, f.params), 0.0);
}

TEST(TrainerTest, SameSeedSameLog) {
  SynthConfig sc;
  sc.num_symbols = 3;
  sc.feature_dim = 4;
  sc.noise_sigma = 0.1;
  LayoutSpec layout;
  layout.max_tokens = 3;
  const auto exs = testing::Examples(GenCorpus(sc, layout, 12, 5));
  LasConfig las = testing::SmallLas(4, 2, 8);
  const Vocab v = SynthVocab(sc);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  auto run = [&](int threads) {
    tc.threads = threads;
    return Train(ModelParams::Random(las, v.size(), 3), las, v, exs, exs, tc);
  };
  const TrainResult a = run(1), b = run(1), c = run(2);
  ASSERT_EQ(a.log.size(), 2u);
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a.log[k].train_loss, b.log[k].train_loss);
    EXPECT_EQ(a.log[k].heldout_loss, b.log[k].heldout_loss);
    EXPECT_EQ(a.log[k].train_loss, c.log[k].train_loss);
  }
  EXPECT_EQ(MaxDiff(a.params, c.params), 0.0);
}

struct NoiselessRun {
  std::vector<TrainExample> train;
  LasConfig las = testing::SmallLas(8, 2, 16);
  ModelParams init;
  TrainResult result;
};

// 200 noiseless utterances, toy model, default settings, 30 epochs.
const NoiselessRun& Noiseless() {
  static const NoiselessRun run = [] {
    SynthConfig sc;
    LayoutSpec layout;
    layout.mid_max = 40;
    NoiselessRun r;
    const Corpus train = GenCorpus(sc, layout, 200, 31);
    r.train = testing::Examples(train);
    r.init = ModelParams::Random(r.las, train.vocab.size(), 33);
    TrainConfig tc;
    tc.epochs = 30;
    r.result = Train(r.init, r.las, train.vocab, r.train,
                     testing::Examples(GenCorpus(sc, layout, 40, 32, "heldout")), tc);
    return r;
  }();
  return run;
}

// The smoothed loss has an entropy floor above 0.3x its initial value, so
// the bound is checked on the unsmoothed cross entropy.
TEST(TrainerTest, ThirtyEpochsCutNoiselessLoss) {
  const NoiselessRun& r = Noiseless();
  const double before = EvaluateLoss(r.init, r.las, r.train, 0.0);
  const double after = EvaluateLoss(r.result.params, r.las, r.train, 0.0);
  EXPECT_LT(after, 0.3 * before) << before << " -> " << after;
}

TEST(TrainerTest, HeldoutLossIsNearlyMonotone) {
  const NoiselessRun& r = Noiseless();
  ASSERT_EQ(r.result.log.size(), 30u);
  for (size_t k = 1; k < r.result.log.size(); ++k) {
    EXPECT_LE(*r.result.log[k].heldout_loss, *r.result.log[k - 1].heldout_loss + 0.05)
        << "epoch " << k + 1;
  }
}

TEST(TrainerTest, WritesCheckpointsPerEpoch) {
  GradFixture f;
  const auto dir = std::filesystem::temp_directory_path() / "olas_trainer_ckpts";
  std::filesystem::remove_all(dir);
  TrainConfig tc;
  tc.epochs = 2;
  tc.checkpoint_dir = dir.string();
  const TrainResult r =
      Train(f.params, f.config, ToyVocab(), {{"x", f.frames, f.target}}, {}, tc);
  EXPECT_TRUE(std::filesystem::exists(dir / "epoch-001.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "epoch-002.ckpt"));
  EXPECT_EQ(MaxDiff(LoadCheckpoint((dir / "last.ckpt").string()).params, r.params), 0.0);
  std::filesystem::remove_all(dir);
}

TEST(TrainerTest, DivergenceRaisesNumericError) {
  GradFixture f;
  TrainConfig tc;
  tc.epochs = 5;
  tc.clip_norm = 0.0;
  tc.learning_rate = 1e300;
  tc.scheduled_sampling = 0.0;
  EXPECT_THROW(Train(f.params, f.config, ToyVocab(),
                     {{"x", f.frames, f.target}, {"y", f.frames, f.target}}, {}, tc),
               NumericError);
}

TEST(TrainerTest, RejectsMalformedTargets) {
  GradFixture f;
  TrainConfig tc;
  tc.epochs = 1;
  EXPECT_THROW(Train(f.params, f.config, ToyVocab(), {{"x", f.frames, {ToyVocab().IdOf("a")}}},
                     {}, tc),
               InvalidArgument);
}

}  // namespace
}  // namespace olas
