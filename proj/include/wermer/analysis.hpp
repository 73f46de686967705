#pragma once

#include <functional>
#include <random>
#include <vector>

#include "wermer/construction.hpp"
#include "wermer/root_finding.hpp"

namespace wermer {

/// Smallest n ≥ 1 with z ∈ D_{n+1}.
int membership_index(cplx z);

struct FiberSample {
  FiberPoint point;
  cplx w;  // double value of the point
};

struct FiberReport {
  cplx z0;
  int N = 1;
  RootSet<cplx> roots;
  std::vector<FiberSample> sublevel_samples;
  double min_pair_gap = 0.0;
  double hausdorff_root_to_sublevel = 0.0;
};

/// Roots of p_N(z0, ·) are the branch values h_s(z0).  Sublevel samples are
/// ray points of the stage-N set and w-lattice points, kept when they pass
/// |p_j| ≤ ε_j for membership_index(z0) ≤ j ≤ N.
FiberReport fiber(const Construction& con, cplx z0, int N, int rays = 16);

struct PotentialSample {
  cplx z, w;
  int N = 2;
  double value = 0.0;
  int clamped_terms = 0;
};

/// u_N = Σ_{n=2}^N max{(1/m_n) log|p_n|, −1}.
PotentialSample potential(const Construction& con, cplx z, const FiberPoint& w, int N);
PotentialSample potential(const Construction& con, cplx z, cplx w, int N);

struct CircleProbe {
  cplx center;
  double radius = 0.1;
  int k = 1;
  int samples = 512;
};

/// Throws ProbeInvalid unless the circle keeps 10 sample spacings from
/// a_1..a_k and the zeros of Z_{k−1}.
void validate_probe(const Construction& con, const CircleProbe& probe);
CircleProbe random_probe(const Construction& con, int k, std::mt19937_64& rng, int samples = 512);

/// min over circle points and branch pairs of g_k of |h_i − h_j| / (c_k|Z_{k−1}β_k|).
double separation_check(const Construction& con, const CircleProbe& probe);

/// max over roots w of p_N(z0, ·) of dist(w, branches of g_k) / (c_k|Z_{k−1}β_k|).
double shadow_check(const Construction& con, cplx z0, int N, int k);
/// Same ratio over stage-N sublevel boundary samples instead of roots.
double shadow_check_sublevel(const Construction& con, cplx z0, int N, int k, int rays = 16);

/// Point where cut k crosses the probe circle, nearest to a_k along the cut.
std::optional<cplx> cut_crossing(const Construction& con, const CircleProbe& probe);

/// Continues every branch of g_k once around the circle starting just past
/// z1 and compares the two one-sided limits at z1.  Returns (min jump over
/// branches, 2c_k|Z_{k−1}(z1)β_k(z1)|).
std::pair<double, double> jump_check(const Construction& con, const CircleProbe& probe, cplx z1);

struct SubharmonicReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();  // M(z) − mean, maximised
  cplx worst_center = 0.0;
};

/// Sub-mean-value test M(z) ≤ (1/2π)∮M(z + re^{iθ})dθ + tol by the
/// trapezoid rule.
SubharmonicReport sub_mean_value(const std::function<double(cplx)>& M, const std::vector<cplx>& centers,
                                 const std::vector<double>& radii, int nodes, double tol);
/// M(z) = max over roots of p_N(z, ·) of u_N.
double fiber_max_potential(const Construction& con, cplx z, int N);
SubharmonicReport fiber_max_subharmonicity(const Construction& con, const std::vector<cplx>& centers, int N,
                                           const std::vector<double>& radii, int nodes = 64, double tol = 1e-3);

struct CloudPoint {
  cplx s, w;
};
using PlaneSampler = std::function<std::vector<cplx>()>;
PlaneSampler segment_sampler(cplx a, cplx b, int count);
PlaneSampler circle_sampler(cplx center, double radius, int count);
PlaneSampler disk_sampler(cplx center, double radius, double density);

/// Stage-N fibre roots over the sampled plane set (approximants of
/// X ∩ ({s} × ℂ)).  The pluripolar hull itself is not computed.
std::vector<CloudPoint> extract_E(const Construction& con, const PlaneSampler& sampler, int N);

}  // namespace wermer
