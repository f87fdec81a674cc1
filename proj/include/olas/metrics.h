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

// Character error rate and consumer perceived latency.

#ifndef OLAS_METRICS_H_
#define OLAS_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "olas/core.h"
#include "olas/streamer.h"

namespace olas {

struct CerReport {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t ref_length = 0;

  int64_t errors() const { return substitutions + insertions + deletions; }
  // Errors per reference token. An empty reference scores its insertions.
  double cer() const { return Rate(errors()); }
  double sub_rate() const { return Rate(substitutions); }
  double ins_rate() const { return Rate(insertions); }
  double del_rate() const { return Rate(deletions); }

  CerReport& operator+=(const CerReport& other);

 private:
  double Rate(int64_t count) const {
    return ref_length > 0 ? static_cast<double>(count) / ref_length
                          : static_cast<double>(count);
  }
};

// Minimal unit-cost edit alignment after removing BOS, EOS and SIL from
// both sides. Among minimal alignments the one with the most substitutions
// is reported.
CerReport ComputeCer(std::span<const int> reference, std::span<const int> hypothesis,
                     const Vocab& vocab);

struct CplRecord {
  bool defined = false;  // false when the alignment has no speech
  double last_speech_end_ms = 0.0;
  double stabilization_ms = 0.0;
  double cpl_ms = 0.0;
  double wall_compute_ms = 0.0;
};

// Stabilization is the time of the last change of the displayed hypothesis
// (0 if it never changed). With `wall_clock`, compute time spent up to that
// change is added to the simulated clock.
CplRecord ComputeCpl(const std::vector<DisplaySnapshot>& display,
                     const Alignment& alignment, int frame_shift_ms,
                     double wall_compute_ms = 0.0, bool wall_clock = false);

// Same, reading the "display" records of a session trace.
CplRecord ComputeCplFromTrace(const std::vector<nlohmann::json>& trace,
                              const Alignment& alignment, int frame_shift_ms,
                              bool wall_clock = false);

// Mean CPL over defined records; 0 when there are none.
double AverageCpl(const std::vector<CplRecord>& records, int* undefined_count);

}  // namespace olas

#endif  // OLAS_METRICS_H_
