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

#include "olas/evaluate.h"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

namespace olas {

ModelProvider SharedModel(ModelPtr model) {
  return [model](const CorpusEntry&) { return model; };
}

ModelProvider OracleProvider(Vocab vocab, OracleConfig config, int feature_dim) {
  return [vocab, config, feature_dim](const CorpusEntry& e) -> ModelPtr {
    if (!e.alignment) throw UnsupportedInput(e.utt_id + ": oracle needs an alignment");
    return std::make_shared<OracleModel>(vocab, config, feature_dim, *e.alignment);
  };
}

namespace {

// Runs fn(0..n-1) on up to `threads` workers; results are written by index.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

UttResult DecodeOne(const CorpusEntry& entry, const ModelProvider& provider,
                    const EvalOptions& options) {
  UttResult r;
  r.utt_id = entry.utt_id;
  try {
    ModelPtr model = provider(entry);
    const Vocab& vocab = model->vocab();
    std::vector<DisplaySnapshot> display;
    if (options.mode == DecodeMode::kOffline) {
      const auto start = std::chrono::steady_clock::now();
      DecodeResult d = DecodeOffline(*model, entry.features, options.beam);
      r.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start).count();
      r.tokens = d.tokens;
      r.trace = std::move(d.trace);
      display.push_back({entry.features.duration_ms(), r.wall_ms,
                         StripNonScoring(r.tokens, vocab)});
      if (display.back().tokens.empty()) display.clear();
    } else {
      OnlineResult o = DecodeOnline(model, entry.features, options.stream, options.beam);
      r.tokens = o.result.tokens;
      r.trace = std::move(o.result.trace);
      r.backtracks = o.backtracks;
      r.restarts = o.restarts;
      r.wall_ms = o.wall_ms;
      display = std::move(o.display);
    }
    r.cer = ComputeCer(vocab.Encode(entry.tokens), r.tokens, vocab);
    if (entry.alignment) {
      r.cpl = ComputeCpl(display, *entry.alignment, entry.features.frame_shift_ms,
                         r.wall_ms, options.wall_clock);
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

}  // namespace

EvalSummary EvaluateCorpus(const Corpus& corpus, const ModelProvider& provider,
                           const EvalOptions& options) {
  EvalSummary s;
  s.utterances.resize(corpus.entries.size());
  ParallelFor(static_cast<int>(corpus.entries.size()), options.threads, [&](int k) {
    s.utterances[k] = DecodeOne(corpus.entries[k], provider, options);
  });
  std::vector<CplRecord> cpls;
  for (const auto& u : s.utterances) {
    if (u.failed) {
      ++s.failures;
      continue;
    }
    s.cer += u.cer;
    s.backtracks += u.backtracks;
    s.restarts += u.restarts;
    s.wall_ms += u.wall_ms;
    cpls.push_back(u.cpl);
  }
  s.avg_cpl_ms = AverageCpl(cpls, &s.undefined_cpl);
  return s;
}

std::vector<SweepRow> RunSweep(const Corpus& corpus, const ModelProvider& provider,
                               const SweepGrid& grid, const BeamConfig& base,
                               bool wall_clock, int threads) {
  if (grid.beams.empty() || grid.min_buffer_ms.empty() || grid.sil_buffer_ms.empty()) {
    throw InvalidArgument("sweep grid is empty");
  }
  std::vector<SweepRow> rows;
  for (int beam : grid.beams) {
    for (int min_ms : grid.min_buffer_ms) {
      for (int sil_ms : grid.sil_buffer_ms) {
        SweepRow row;
        row.beam = beam;
        row.min_buffer_ms = min_ms;
        row.sil_buffer_ms = sil_ms == kSilBufferFollowsMin ? min_ms : sil_ms;
        row.batch_ms = grid.batch_ms;
        rows.push_back(row);
      }
    }
  }
  // Grid points run one after another; utterances within a point in parallel.
  for (auto& row : rows) {
    EvalOptions options;
    options.mode = DecodeMode::kOnline;
    options.beam = base;
    options.beam.beam_size = row.beam;
    options.stream.batch_ms = row.batch_ms;
    options.stream.min_buffer_ms = row.min_buffer_ms;
    options.stream.sil_buffer_ms = row.sil_buffer_ms;
    options.wall_clock = wall_clock;
    options.threads = threads;
    try {
      options.beam.Validate();
      options.stream.Validate();
      row.summary = EvaluateCorpus(corpus, provider, options);
      if (!wall_clock) row.summary.wall_ms = 0.0;
      if (row.summary.failures > 0) {
        row.failed = true;
        for (const auto& u : row.summary.utterances) {
          if (u.failed) {
            row.error = u.utt_id + ": " + u.error;
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  }
  return rows;
}

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "beam,min_buffer_ms,sil_buffer_ms,batch_ms,cer,sub_rate,ins_rate,del_rate,"
         "avg_cpl_ms,undefined_cpl_count,backtracks,wall_ms\n";
  char buf[512];
  for (const auto& r : rows) {
    out << r.beam << ',' << r.min_buffer_ms << ',' << r.sil_buffer_ms << ','
        << r.batch_ms << ',';
    if (r.failed) {
      out << "failed,failed,failed,failed,failed,failed,failed,failed\n";
      continue;
    }
    const EvalSummary& s = r.summary;
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.3f,%d,%d,%.3f\n",
                  s.cer.cer(), s.cer.sub_rate(), s.cer.ins_rate(), s.cer.del_rate(),
                  s.avg_cpl_ms, s.undefined_cpl, s.backtracks, s.wall_ms);
    out << buf;
  }
}

}  // namespace olas
