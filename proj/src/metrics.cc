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

#include "olas/metrics.h"

#include <utility>

namespace olas {

CerReport& CerReport::operator+=(const CerReport& other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  ref_length += other.ref_length;
  return *this;
}

CerReport ComputeCer(std::span<const int> reference, std::span<const int> hypothesis,
                     const Vocab& vocab) {
  const Transcript ref = StripNonScoring(reference, vocab);
  const Transcript hyp = StripNonScoring(hypothesis, vocab);
  const size_t n = ref.size();
  const size_t m = hyp.size();
  // Cost is (edits, insertions + deletions), compared lexicographically.
  using Cost = std::pair<int64_t, int64_t>;
  std::vector<std::vector<Cost>> d(n + 1, std::vector<Cost>(m + 1));
  for (size_t i = 1; i <= n; ++i) d[i][0] = {static_cast<int64_t>(i), static_cast<int64_t>(i)};
  for (size_t j = 1; j <= m; ++j) d[0][j] = {static_cast<int64_t>(j), static_cast<int64_t>(j)};
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      Cost best = {d[i - 1][j - 1].first + sub, d[i - 1][j - 1].second};
      best = std::min(best, Cost{d[i - 1][j].first + 1, d[i - 1][j].second + 1});
      best = std::min(best, Cost{d[i][j - 1].first + 1, d[i][j - 1].second + 1});
      d[i][j] = best;
    }
  }
  CerReport r;
  r.ref_length = static_cast<int64_t>(n);
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const int64_t sub = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (d[i][j] == Cost{d[i - 1][j - 1].first + sub, d[i - 1][j - 1].second}) {
        r.substitutions += sub;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[i][j] == Cost{d[i - 1][j].first + 1, d[i - 1][j].second + 1}) {
      ++r.deletions;
      --i;
    } else {
      ++r.insertions;
      --j;
    }
  }
  return r;
}

CplRecord ComputeCpl(const std::vector<DisplaySnapshot>& display,
                     const Alignment& alignment, int frame_shift_ms,
                     double wall_compute_ms, bool wall_clock) {
  if (frame_shift_ms <= 0) throw InvalidArgument("frame shift must be positive");
  CplRecord r;
  r.wall_compute_ms = wall_compute_ms;
  if (!display.empty()) {
    r.stabilization_ms = display.back().clock_ms;
    if (wall_clock) r.stabilization_ms += display.back().wall_ms;
  }
  const int last = alignment.LastSpeechEndFrame();
  if (last < 0) return r;
  r.defined = true;
  r.last_speech_end_ms = static_cast<double>(last) * frame_shift_ms;
  r.cpl_ms = r.stabilization_ms - r.last_speech_end_ms;
  return r;
}

CplRecord ComputeCplFromTrace(const std::vector<nlohmann::json>& trace,
                              const Alignment& alignment, int frame_shift_ms,
                              bool wall_clock) {
  std::vector<DisplaySnapshot> display;
  double wall = 0.0;
  for (const auto& rec : trace) {
    if (rec.value("event", "") != "display") continue;
    DisplaySnapshot s;
    s.clock_ms = rec.at("clock_ms").get<double>();
    s.wall_ms = rec.value("wall_ms", 0.0);
    s.tokens = rec.at("tokens").get<std::vector<int>>();
    wall = s.wall_ms;
    display.push_back(std::move(s));
  }
  return ComputeCpl(display, alignment, frame_shift_ms, wall, wall_clock);
}

double AverageCpl(const std::vector<CplRecord>& records, int* undefined_count) {
  double sum = 0.0;
  int defined = 0;
  int undefined = 0;
  for (const auto& r : records) {
    if (r.defined) {
      sum += r.cpl_ms;
      ++defined;
    } else {
      ++undefined;
    }
  }
  if (undefined_count != nullptr) *undefined_count = undefined;
  return defined > 0 ? sum / defined : 0.0;
}

}  // namespace olas
