#include "wermer/branches.hpp"

#include <cmath>
#include <numbers>

#include "wermer/errors.hpp"

namespace wermer {

double cut_angle(int j) {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double x = j * golden;
  return 2.0 * std::numbers::pi * (x - std::floor(x));
}

std::vector<Cut> make_cuts(const BranchPointTable& table, int count) {
  std::vector<Cut> cuts;
  for (int j = 1; j <= count; ++j) cuts.push_back({table[j - 1], std::polar(1.0, cut_angle(j))});
  return cuts;
}

cplx sqrt_cut(cplx u, cplx direction) {
  const cplx v = u * std::conj(direction);
  double t = std::arg(v);
  if (t < 0) t += 2.0 * std::numbers::pi;
  double half_dir = std::arg(direction);
  if (half_dir < 0) half_dir += 2.0 * std::numbers::pi;
  return std::polar(std::sqrt(std::abs(v)), 0.5 * (t + half_dir));
}

cplx beta_prefix(int j, cplx z, std::span<const Cut> cuts) {
  cplx prod = 1.0;
  for (int l = 1; l < j; ++l) prod *= z - cuts[l - 1].base;
  return prod;
}

cplx beta_eval(int j, cplx z, std::span<const Cut> cuts) {
  const Cut& cut = cuts[j - 1];
  return beta_prefix(j, z, cuts) * sqrt_cut(z - cut.base, cut.direction);
}

int ZPoly::degree() const {
  int d = 0;
  for (const auto& r : roots) d += r.second;
  return d;
}

cplx ZPoly::operator()(cplx z) const {
  cplx prod = 1.0;
  for (const auto& [r, m] : roots)
    for (int k = 0; k < m; ++k) prod *= z - r;
  return prod;
}

double ZPoly::log_abs(cplx z) const {
  double s = 0.0;
  for (const auto& [r, m] : roots) s += m * std::log(std::abs(z - r));
  return s;
}

bool ZPoly::contains(const ZPoly& other, double tol) const {
  for (const auto& [r, m] : other.roots) {
    int have = 0;
    for (const auto& [q, k] : roots)
      if (std::abs(q - r) <= tol) have += k;
    if (have < m) return false;
  }
  return true;
}

void StageFunctionSet::terms(cplx z, std::span<cplx> out) const {
  cplx prefix = 1.0;
  for (int j = 1; j <= n; ++j) {
    const Cut& cut = cuts[j - 1];
    out[j - 1] = c[j - 1] * Z[j - 1](z) * prefix * sqrt_cut(z - cut.base, cut.direction);
    prefix *= z - cut.base;
  }
}

std::vector<cplx> StageFunctionSet::terms(cplx z) const {
  std::vector<cplx> out(n);
  terms(z, out);
  return out;
}

cplx branch_from_terms(std::uint32_t mask, std::span<const cplx> T) {
  cplx h = 0.0;
  for (std::size_t j = 0; j < T.size(); ++j) h += ((mask >> j) & 1u) ? -T[j] : T[j];
  return h;
}

cplx branch_eval(SignVector s, cplx z, const StageFunctionSet& fs) {
  return branch_from_terms(s.mask, fs.terms(z));
}

std::vector<cplx> branch_values(std::span<const cplx> T) {
  std::vector<cplx> out(std::size_t(1) << T.size());
  for (std::uint32_t m = 0; m < out.size(); ++m) out[m] = branch_from_terms(m, T);
  return out;
}

cplx branch_gap(std::uint32_t s, int len_s, std::uint32_t t, int len_t, std::span<const cplx> T) {
  cplx d = 0.0;
  const int len = std::max(len_s, len_t);
  for (int j = 0; j < len; ++j) {
    const int ss = j < len_s ? (((s >> j) & 1u) ? -1 : 1) : 0;
    const int tt = j < len_t ? (((t >> j) & 1u) ? -1 : 1) : 0;
    if (ss != tt) d += double(ss - tt) * T[j];
  }
  return d;
}

SignVector monodromy(cplx center, double radius, SignVector s, const StageFunctionSet& fs,
                     const BranchPointTable& table) {
  const double tol = 1e-9 * std::max(1.0, radius);
  double min_dist = radius;
  for (int j = 0; j < fs.n; ++j) {
    const double d = std::abs(std::abs(table[j] - center) - radius);
    if (d <= tol) throw Error(ErrorKind::BranchPointOnLoop, "branch point a_" + std::to_string(j + 1) + " lies on the loop");
    min_dist = std::min(min_dist, d);
  }
  // Each radical √(z − a_j) is continued by nearest-sign choice; steps stay
  // well below the separation 2|√(z − a_j)| of its two values.
  const int steps = std::max(720, int(std::ceil(2.0 * std::numbers::pi * radius / (0.05 * min_dist))));
  const cplx z0 = center + radius;
  SignVector out = s;
  for (int j = 1; j <= fs.n; ++j) {
    const Cut& cut = fs.cuts[j - 1];
    const cplx start = sqrt_cut(z0 - cut.base, cut.direction);
    cplx v = start;
    for (int k = 1; k <= steps; ++k) {
      const cplx z = center + std::polar(radius, 2.0 * std::numbers::pi * k / steps);
      const cplx r = std::sqrt(z - cut.base);
      v = std::abs(r - v) <= std::abs(r + v) ? r : -r;
    }
    if (std::abs(v + start) < std::abs(v - start)) out = out.flipped(j);
  }
  return out;
}

SignVector predicted_monodromy(cplx center, double radius, SignVector s, const StageFunctionSet& fs) {
  SignVector out = s;
  for (int j = 1; j <= fs.n; ++j)
    if (std::abs(fs.a[j - 1] - center) < radius) out = out.flipped(j);
  return out;
}

}  // namespace wermer
