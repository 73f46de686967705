#include "wermer/collision.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <numbers>

#include "wermer/discriminant.hpp"
#include "wermer/errors.hpp"
#include "wermer/root_finding.hpp"

namespace wermer {

namespace {

int popcount(std::uint32_t x) { return std::popcount(x); }

// Signs restricted to `members`: bit j of `signs` means σ_{j+1} = −1.
cplx signed_sum(std::span<const cplx> T, std::uint32_t members, std::uint32_t signs) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < T.size(); ++j)
    if ((members >> j) & 1u) s += ((signs >> j) & 1u) ? -T[j] : T[j];
  return s;
}

// Sign patterns on `members` whose lowest member is +.
std::vector<std::uint32_t> half_patterns(std::uint32_t members) {
  const std::uint32_t lowest = members & (~members + 1u);
  std::vector<std::uint32_t> out;
  const std::uint32_t rest = members & ~lowest;
  // Enumerate subsets of `rest`.
  std::uint32_t sub = 0;
  do {
    out.push_back(sub);
    sub = (sub - rest) & rest;
  } while (sub != 0);
  return out;
}

std::vector<cplx> base_sqrts(const StageFunctionSet& fs, cplx base) {
  std::vector<cplx> r(fs.n);
  for (int j = 0; j < fs.n; ++j) r[j] = sqrt_cut(base - fs.cuts[j].base, fs.cuts[j].direction);
  return r;
}

double dist_to_branch_points(const StageFunctionSet& fs, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < fs.n; ++j) d = std::min(d, std::abs(z - fs.a[j]));
  return d;
}

// Newton on f_{D,σ} with the radicals continued from the starting point.
std::optional<cplx> polish(const StageFunctionSet& fs, std::uint32_t members, cplx z0) {
  const auto roots0 = base_sqrts(fs, z0);
  std::uint32_t best_sign = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t sg : half_patterns(members)) {
    const double v = std::abs(local_difference(fs, members, sg, z0, roots0, z0));
    if (v < best) best = v, best_sign = sg;
  }
  cplx z = z0;
  const double h = 1e-7 * std::max(1.0, std::abs(z0));
  for (int it = 0; it < 60; ++it) {
    const cplx f = local_difference(fs, members, best_sign, z0, roots0, z);
    const cplx df = (local_difference(fs, members, best_sign, z0, roots0, z + h) -
                     local_difference(fs, members, best_sign, z0, roots0, z - h)) / (2.0 * h);
    if (f == 0.0 || df == 0.0) break;
    const cplx step = f / df;
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  if (std::abs(z - z0) > 1e-3 * std::max(1.0, std::abs(z0))) return std::nullopt;
  const auto T = fs.terms(z);
  double scale = 0.0;
  for (const auto& t : T) scale += std::abs(t);
  const double resid = std::abs(local_difference(fs, members, best_sign, z0, roots0, z));
  if (resid > 1e-8 * std::max(scale, 1e-300)) return std::nullopt;
  return z;
}

}  // namespace

cplx local_difference(const StageFunctionSet& fs, std::uint32_t members, std::uint32_t signs, cplx base,
                      std::span<const cplx> base_roots, cplx z) {
  cplx prefix = 1.0, sum = 0.0;
  for (int j = 0; j < fs.n; ++j) {
    if ((members >> j) & 1u) {
      const cplx a = fs.a[j];
      const cplx rad = base_roots[j] * std::sqrt((z - a) / (base - a));
      const cplx t = fs.c[j] * fs.Z[j](z) * prefix * rad;
      sum += ((signs >> j) & 1u) ? -t : t;
    }
    prefix *= z - fs.a[j];
  }
  return sum;
}

UniPoly<cplx> norm_polynomial(const StageFunctionSet& fs, std::uint32_t members) {
  if (popcount(members) < 2) throw Error(ErrorKind::Degenerate, "norm_polynomial needs at least two terms");
  const auto patterns = half_patterns(members);
  double growth = 0.0;
  for (int j = 0; j < fs.n; ++j)
    if ((members >> j) & 1u) growth = std::max(growth, fs.Z[j].degree() + j + 0.5);
  const int bound = int(std::floor(double(patterns.size()) * growth));
  auto f = [&](cplx z) {
    const auto T = fs.terms(z);
    cplx prod = 1.0;
    for (std::uint32_t sg : patterns) prod *= signed_sum(T, members, sg);
    return prod;
  };
  return interpolate_adaptive(f, bound);
}

int collision_order(const StageFunctionSet& fs, cplx zstar, double r1, const CollisionOptions& opt) {
  const auto roots0 = base_sqrts(fs, zstar);
  const std::uint32_t all = (1u << fs.n) - 1u;
  for (int attempt = 0; attempt <= opt.max_shrinks; ++attempt, r1 /= 8.0) {
    auto ring_mean = [&](std::uint32_t members, std::uint32_t sg, double r) {
      double s = 0.0;
      for (int k = 0; k < opt.ring_samples; ++k) {
        const cplx z = zstar + std::polar(r, 2.0 * std::numbers::pi * (k + 0.3) / opt.ring_samples);
        s += std::log(std::abs(local_difference(fs, members, sg, zstar, roots0, z)));
      }
      return s / opt.ring_samples;
    };
    int order = 0;
    bool stable = true;
    for (std::uint32_t members = 1; members <= all && stable; ++members)
      for (std::uint32_t sg : half_patterns(members)) {
        const double l1 = ring_mean(members, sg, r1), l2 = ring_mean(members, sg, r1 / 2), l4 = ring_mean(members, sg, r1 / 4);
        const double sa = (l1 - l2) / std::numbers::ln2, sb = (l2 - l4) / std::numbers::ln2;
        if (!std::isfinite(sa) || !std::isfinite(sb) || std::abs(sa - sb) > 0.25) {
          stable = false;
          break;
        }
        order = std::max(order, int(std::lround(sb)));
      }
    if (stable) return order;
  }
  throw Error(ErrorKind::OrderEstimateUnstable, "vanishing order slopes disagree after shrinking");
}

ZPoly compute_Z(int n, const StageFunctionSet& fs, const CollisionOptions& opt) {
  if (n < 1 || fs.n != n) throw Error(ErrorKind::Degenerate, "compute_Z: stage mismatch");
  if (n == 1) return {};
  std::vector<cplx> cand;
  auto add = [&](cplx z) {
    if (dist_to_branch_points(fs, z) < opt.branch_exclusion) return;
    for (const auto& q : cand)
      if (std::abs(q - z) <= 1e-7 * std::max(1.0, std::abs(z))) return;
    cand.push_back(z);
  };
  for (const auto& [r, m] : fs.Z[n - 1].roots) add(r);
  const std::uint32_t all = (1u << n) - 1u;
  for (std::uint32_t members = 1; members <= all; ++members) {
    if (popcount(members) < 2) continue;
    const auto N = norm_polynomial(fs, members);
    if (N.degree() < 1) continue;
    for (const auto& z0 : uni_roots(N, 0.0).roots)
      if (auto z = polish(fs, members, z0)) add(*z);
  }
  ZPoly out;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    double sep = dist_to_branch_points(fs, cand[i]);
    for (std::size_t k = 0; k < cand.size(); ++k)
      if (k != i) sep = std::min(sep, std::abs(cand[k] - cand[i]));
    const int m = collision_order(fs, cand[i], std::min(0.1 * sep, 0.05 * std::max(1.0, std::abs(cand[i]))), opt);
    if (m > 0) out.roots.push_back({cand[i], m});
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real()) return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  return out;
}

}  // namespace wermer
