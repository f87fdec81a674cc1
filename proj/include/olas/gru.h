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

#ifndef OLAS_GRU_H_
#define OLAS_GRU_H_

#include <cmath>

#include "olas/core.h"

namespace olas {

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Gated recurrent cell. Gate blocks are packed [update; reset; candidate]:
//   z = sigm(Wz x + Uz h + bz)
//   r = sigm(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r * h) + bn)
//   h' = (1 - z) * n + z * h
struct GruParams {
  Matrix w;  // 3H x in
  Matrix u;  // 3H x H
  Matrix b;  // 3H x 1

  int hidden() const { return static_cast<int>(u.cols()); }
  int input() const { return static_cast<int>(w.cols()); }

  static GruParams Zeros(int input, int hidden) {
    return {Matrix::Zero(3 * hidden, input), Matrix::Zero(3 * hidden, hidden),
            Matrix::Zero(3 * hidden, 1)};
  }
};

struct GruCache {
  Vector x;
  Vector h_prev;
  Vector z;
  Vector r;
  Vector n;
};

Vector GruForward(const GruParams& p, const Vector& x, const Vector& h_prev,
                  GruCache* cache = nullptr);

// Accumulates parameter gradients into `grad` and returns dL/dx and dL/dh_prev
// through the out-parameters.
void GruBackward(const GruParams& p, const GruCache& cache, const Vector& dh,
                 GruParams* grad, Vector* dx, Vector* dh_prev);

}  // namespace olas

#endif  // OLAS_GRU_H_
