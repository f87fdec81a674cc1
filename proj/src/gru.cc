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

#include "olas/gru.h"

namespace olas {

Vector GruForward(const GruParams& p, const Vector& x, const Vector& h_prev,
                  GruCache* cache) {
  const int hd = p.hidden();
  const Vector a = p.w * x + p.b.col(0);
  const Vector uh = p.u.topRows(2 * hd) * h_prev;
  Vector z(hd), r(hd);
  for (int k = 0; k < hd; ++k) {
    z[k] = Sigmoid(a[k] + uh[k]);
    r[k] = Sigmoid(a[hd + k] + uh[hd + k]);
  }
  const Vector rh = r.cwiseProduct(h_prev);
  Vector n = (a.segment(2 * hd, hd) + p.u.bottomRows(hd) * rh).array().tanh();
  Vector h = (1.0 - z.array()) * n.array() + z.array() * h_prev.array();
  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return h;
}

void GruBackward(const GruParams& p, const GruCache& c, const Vector& dh,
                 GruParams* grad, Vector* dx, Vector* dh_prev) {
  const int hd = p.hidden();
  const Vector dn = dh.cwiseProduct((1.0 - c.z.array()).matrix());
  const Vector dz = dh.cwiseProduct(c.h_prev - c.n);
  Vector dhp = dh.cwiseProduct(c.z);

  const Vector dan = dn.cwiseProduct((1.0 - c.n.array().square()).matrix());
  const Vector rh = c.r.cwiseProduct(c.h_prev);
  const Vector drh = p.u.bottomRows(hd).transpose() * dan;
  const Vector dr = drh.cwiseProduct(c.h_prev);
  dhp += drh.cwiseProduct(c.r);

  const Vector daz = dz.cwiseProduct((c.z.array() * (1.0 - c.z.array())).matrix());
  const Vector dar = dr.cwiseProduct((c.r.array() * (1.0 - c.r.array())).matrix());

  Vector da(3 * hd);
  da << daz, dar, dan;

  grad->u.topRows(hd).noalias() += daz * c.h_prev.transpose();
  grad->u.middleRows(hd, hd).noalias() += dar * c.h_prev.transpose();
  grad->u.bottomRows(hd).noalias() += dan * rh.transpose();
  dhp.noalias() += p.u.topRows(hd).transpose() * daz;
  dhp.noalias() += p.u.middleRows(hd, hd).transpose() * dar;

  grad->w.noalias() += da * c.x.transpose();
  grad->b.col(0) += da;
  *dx = p.w.transpose() * da;
  *dh_prev = std::move(dhp);
}

}  // namespace olas
