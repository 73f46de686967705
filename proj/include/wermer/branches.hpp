#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wermer/branch_points.hpp"
#include "wermer/uni_poly.hpp"

namespace wermer {

/// Ray from `base` towards `direction` (unit modulus).
struct Cut {
  cplx base;
  cplx direction;
};

/// θ_j = 2π·frac(j·(√5−1)/2), j 1-based.
double cut_angle(int j);
std::vector<Cut> make_cuts(const BranchPointTable& table, int count);

/// Square root of u with the cut along `direction`; on the cut itself the
/// counterclockwise-side limit is returned.
cplx sqrt_cut(cplx u, cplx direction);

/// β_j(z) = Π_{l<j}(z − a_l) · sqrt_j(z − a_j), j 1-based.
cplx beta_eval(int j, cplx z, std::span<const Cut> cuts);

/// B_j(z) = Π_{l<j}(z − a_l) · (z − a_j)^{1/2}, the product part only
/// (before the radical).
cplx beta_prefix(int j, cplx z, std::span<const Cut> cuts);

/// Polynomial held by its roots; evaluations use the product form.
struct ZPoly {
  std::vector<std::pair<cplx, int>> roots;
  int degree() const;
  cplx operator()(cplx z) const;
  double log_abs(cplx z) const;
  UniPoly<cplx> expanded() const { return UniPoly<cplx>::from_roots(roots); }
  /// Every root of `other` appears here with at least its multiplicity.
  bool contains(const ZPoly& other, double tol) const;
};

/// Signs s_1..s_n; bit j-1 of the mask set means s_j = −1.
struct SignVector {
  int n = 0;
  std::uint32_t mask = 0;
  int operator[](int j) const { return (mask >> (j - 1)) & 1u ? -1 : 1; }
  SignVector flipped(int j) const { return {n, mask ^ (1u << (j - 1))}; }
  bool operator==(const SignVector&) const = default;
};

/// Data defining g_n: c_1..c_n, Z_0..Z_{n−1}, branch points and cuts.
struct StageFunctionSet {
  int n = 0;
  std::vector<double> c;
  std::vector<ZPoly> Z;
  std::vector<cplx> a;
  std::vector<Cut> cuts;

  /// T_j(z) = c_j Z_{j−1}(z) β_j(z), j = 1..n, returned 0-based.
  std::vector<cplx> terms(cplx z) const;
  void terms(cplx z, std::span<cplx> out) const;
};

/// h_s(z) = Σ s_j T_j(z).
cplx branch_eval(SignVector s, cplx z, const StageFunctionSet& fs);
cplx branch_from_terms(std::uint32_t mask, std::span<const cplx> T);
/// All 2^n branch values indexed by mask.
std::vector<cplx> branch_values(std::span<const cplx> T);

/// h_s − h_t summed termwise, so nearly equal branches cancel exactly in
/// the shared terms.  Signs beyond a vector's length count as zero.
cplx branch_gap(std::uint32_t s, int len_s, std::uint32_t t, int len_t, std::span<const cplx> T);

/// Sign vector after continuing h_s once counterclockwise around the circle.
SignVector monodromy(cplx center, double radius, SignVector s, const StageFunctionSet& fs,
                     const BranchPointTable& table);

/// Flip every sign whose branch point lies inside the circle.
SignVector predicted_monodromy(cplx center, double radius, SignVector s, const StageFunctionSet& fs);

}  // namespace wermer
