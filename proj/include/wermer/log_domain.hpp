#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wermer/branches.hpp"

namespace wermer {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log|d + e^{log_r + iθ}| without forming e^{log_r} when it under- or
/// overflows relative to d.
double log_abs_sum(cplx d, double log_r, double theta);
/// Same with the offset direction e^{iθ} given as a unit complex number.
double log_abs_sum(cplx d, double log_r, cplx dir);

/// A fibre point w = h_anchor(z) + e^{log_r + iθ}.  With anchor_len = 0 the
/// anchor is 0 and the offset alone is w.
struct FiberPoint {
  int anchor_len = 0;
  std::uint32_t anchor = 0;
  double log_r = kNegInf;
  double theta = 0.0;

  static FiberPoint plain(cplx w);
  static FiberPoint root(int len, std::uint32_t mask) { return {len, mask, kNegInf, 0.0}; }
  FiberPoint offset_by(double log_r_new, double theta_new) const { return {anchor_len, anchor, log_r_new, theta_new}; }
  /// Double value of w (loses the offset below rounding of h_anchor).
  cplx value(std::span<const cplx> T) const;
};

/// log|p_n(z, w)| = log δ_n + Σ_t log|w − h_t(z)| with T = terms at z
/// (at least max(n, anchor_len) of them).
double log_abs_p(std::span<const cplx> T, int n, double log_delta, const FiberPoint& pt);

/// log of the distance from pt to the nearest root of p_n(z, ·).
double log_root_distance(std::span<const cplx> T, int n, const FiberPoint& pt);

/// First u along the ray h_s + e^{u + iθ} where log|p_n| reaches log_eps.
/// Returns nullopt when no crossing is found below u_max.
std::optional<double> sublevel_crossing(std::span<const cplx> T, int n, double log_delta, std::uint32_t s,
                                        double theta, double log_eps, double u_max = 12.0);

/// Points on the boundary of {|p_n(z,·)| ≤ ε} reached along `rays` rays
/// from every root, plus (optionally) the ray midpoints, all inside the set.
struct SublevelSamples {
  std::vector<FiberPoint> boundary;
  std::vector<FiberPoint> interior;
};
SublevelSamples sublevel_samples(std::span<const cplx> T, int n, double log_delta, double log_eps, int rays,
                                 bool with_interior);

}  // namespace wermer
