#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "wermer/scalar.hpp"

namespace wermer {

/// Square lattice of spacing 1/density restricted to |z| < radius.  The
/// irrational offset keeps rational branch points off the lattice.
inline std::vector<cplx> disk_lattice(double radius, double density) {
  constexpr double ox = 0.3819660112501051, oy = 0.6180339887498949;
  const double h = 1.0 / density;
  const int k = int(std::ceil(radius / h)) + 1;
  std::vector<cplx> out;
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      const cplx z((i + ox) * h, (j + oy) * h);
      if (std::abs(z) < radius) out.push_back(z);
    }
  return out;
}

inline std::vector<cplx> circle_points(cplx center, double radius, int count, double phase = 0.0) {
  std::vector<cplx> out(count);
  for (int k = 0; k < count; ++k)
    out[k] = center + std::polar(radius, 2.0 * std::numbers::pi * (k + phase) / count);
  return out;
}

/// Every stride-th lattice point, about `count` of them.
inline std::vector<cplx> subsample(const std::vector<cplx>& pts, std::size_t count) {
  if (pts.size() <= count) return pts;
  std::vector<cplx> out;
  const double stride = double(pts.size()) / double(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(pts[std::size_t(k * stride)]);
  return out;
}

}  // namespace wermer
