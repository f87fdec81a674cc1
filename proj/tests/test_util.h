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

// Fixtures shared by the unit and acceptance tests.

#ifndef OLAS_TESTS_TEST_UTIL_H_
#define OLAS_TESTS_TEST_UTIL_H_

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "olas/evaluate.h"
#include "olas/synth.h"
#include "olas/trainer.h"

namespace olas::testing {

inline Matrix RandomFrames(int rows, int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, dim);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = n(rng);
  }
  return m;
}

inline LasConfig SmallLas(int input_dim, int layers, int hidden) {
  LasConfig c;
  c.encoder.num_layers = layers;
  c.encoder.input_dim = input_dim;
  c.encoder.hidden_units = hidden;
  c.encoder.projection_dim = hidden;
  c.attention.chunk_size = 2;
  c.attention.energy_hidden_dim = hidden;
  c.decoder_hidden = hidden;
  c.embedding_dim = 4;
  return c;
}

inline std::shared_ptr<LasModel> RandomLas(const Vocab& vocab, const LasConfig& config,
                                           uint64_t seed) {
  return std::make_shared<LasModel>(
      vocab, config, ModelParams::Random(config, vocab.size(), seed));
}

// Oracle for one synthetic utterance.
inline ModelPtr Oracle(const Corpus& corpus, const CorpusEntry& entry,
                       const OracleConfig& config) {
  return std::make_shared<OracleModel>(corpus.vocab, config,
                                       entry.features.dim(), *entry.alignment);
}

inline std::vector<TrainExample> Examples(const Corpus& corpus) {
  std::vector<TrainExample> out;
  for (const auto& e : corpus.entries) {
    std::vector<int> target = {corpus.vocab.bos_id()};
    for (int id : corpus.vocab.Encode(e.tokens)) target.push_back(id);
    target.push_back(corpus.vocab.eos_id());
    out.push_back({e.utt_id, e.features.frames, std::move(target)});
  }
  return out;
}

// Three-layer (R = 8) corpus where each utterance has one mid silence of
// 12..40 encoded frames and no leading or trailing silence.
inline Corpus MidSilenceCorpus(int n, uint64_t seed) {
  SynthConfig sc;
  LayoutSpec layout;
  layout.min_tokens = 2;
  layout.max_tokens = 5;
  layout.mid_count_min = 1;
  layout.mid_count_max = 1;
  layout.mid_min = 96;
  layout.mid_max = 327;
  layout.quantum = 8;
  return GenCorpus(sc, layout, n, seed);
}

}  // namespace olas::testing

#endif  // OLAS_TESTS_TEST_UTIL_H_
