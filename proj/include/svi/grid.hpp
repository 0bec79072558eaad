#pragma once

#include <cmath>
#include <vector>

#include "svi/types.hpp"

namespace svi {

/// Product grid lo + i*step per coordinate (last coordinate fastest).
/// Coordinates are computed as lo + i*step, never by accumulation.
inline std::vector<Vec> product_grid(const Vec& lo, const Vec& hi, const Vec& step) {
  const Eigen::Index d = lo.size();
  if (hi.size() != d || step.size() != d) throw Error("dim_mismatch", "grid bounds and step differ in length");
  std::vector<long> counts(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(step(i) > 0.0) || hi(i) < lo(i)) throw Error("invalid_grid", "grid needs step > 0 and hi >= lo");
    counts[i] = std::lround(std::floor((hi(i) - lo(i)) / step(i) + 1e-9)) + 1;
  }
  std::vector<Vec> out;
  if (d == 0) {
    out.emplace_back(0);
    return out;
  }
  std::vector<long> idx(d, 0);
  for (;;) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = lo(i) + static_cast<double>(idx[i]) * step(i);
    out.push_back(std::move(v));
    Eigen::Index i = d - 1;
    while (i >= 0 && ++idx[i] == counts[i]) {
      idx[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

inline std::vector<Vec> product_grid(double lo, double hi, double step) {
  return product_grid(Vec::Constant(1, lo), Vec::Constant(1, hi), Vec::Constant(1, step));
}

}  // namespace svi
