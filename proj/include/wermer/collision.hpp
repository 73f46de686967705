#pragma once

#include "wermer/branches.hpp"

namespace wermer {

struct CollisionOptions {
  int ring_samples = 16;
  double branch_exclusion = 1e-5;
  int max_shrinks = 3;
};

/// f_{D,σ}(z) = Σ_{j∈D} σ_j T_j(z) with each radical continued from `base`
/// (valid in a disk around base avoiding a_1..a_n).
cplx local_difference(const StageFunctionSet& fs, std::uint32_t members, std::uint32_t signs, cplx base,
                      std::span<const cplx> base_roots, cplx z);

/// N_D(z) = Π over sign patterns with the first member positive of
/// Σ_{j∈D} σ_j T_j(z); a polynomial for |D| ≥ 2.
UniPoly<cplx> norm_polynomial(const StageFunctionSet& fs, std::uint32_t members);

/// Vanishing order at z* of the worst branch difference of g_n, from the
/// slope of ring means of log|f| at three radii.
int collision_order(const StageFunctionSet& fs, cplx zstar, double r1, const CollisionOptions& opt = {});

/// Z_n = Π (z − z_i)^{m_i} over collision points of the branches of g_n,
/// excluding a_1..a_n.  Z_1 = 1.
ZPoly compute_Z(int n, const StageFunctionSet& fs, const CollisionOptions& opt = {});

}  // namespace wermer
