#include "wermer/log_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace wermer {

double log_abs_sum(cplx d, double log_r, cplx dir) {
  const double n2 = std::norm(d);
  if (log_r == kNegInf) return 0.5 * std::log(n2);
  if (n2 == 0.0) return log_r;
  const double la = 0.5 * std::log(n2);
  // |d + x| = |d| |1 + x/d| with |x/d| = e^{log_r − la}.
  const double rel = log_r - la;
  const cplx unit = dir * std::conj(d) / std::sqrt(n2);  // direction of x/d
  if (rel < -30.0) return la + std::exp(rel) * unit.real();
  if (rel > 30.0) return log_r + std::exp(-rel) * unit.real();
  const cplx q = 1.0 + std::exp(rel) * unit;
  return la + 0.5 * std::log(std::norm(q));
}

double log_abs_sum(cplx d, double log_r, double theta) { return log_abs_sum(d, log_r, std::polar(1.0, theta)); }

FiberPoint FiberPoint::plain(cplx w) {
  if (w == 0.0) return {0, 0, kNegInf, 0.0};
  return {0, 0, std::log(std::abs(w)), std::arg(w)};
}

cplx FiberPoint::value(std::span<const cplx> T) const {
  cplx h = anchor_len == 0 ? cplx(0.0) : branch_from_terms(anchor, T.first(anchor_len));
  if (log_r != kNegInf) h += std::polar(std::exp(log_r), theta);
  return h;
}

namespace {

// w − h_t = (h_anchor − h_t) + offset.
double log_term(std::span<const cplx> T, int n, std::uint32_t t, const FiberPoint& pt, cplx dir) {
  const cplx d = branch_gap(pt.anchor, pt.anchor_len, t, n, T);
  return log_abs_sum(d, pt.log_r, dir);
}

}  // namespace

double log_abs_p(std::span<const cplx> T, int n, double log_delta, const FiberPoint& pt) {
  double s = log_delta;
  const std::uint32_t count = 1u << n;
  const cplx dir = std::polar(1.0, pt.theta);
  for (std::uint32_t t = 0; t < count; ++t) {
    s += log_term(T, n, t, pt, dir);
    if (s == kNegInf) return s;
  }
  return s;
}

double log_root_distance(std::span<const cplx> T, int n, const FiberPoint& pt) {
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t count = 1u << n;
  const cplx dir = std::polar(1.0, pt.theta);
  for (std::uint32_t t = 0; t < count; ++t) best = std::min(best, log_term(T, n, t, pt, dir));
  return best;
}

namespace {

struct RootModel {
  std::vector<cplx> gaps;   // h_s − h_t, t ≠ s, nonzero
  int zero_gaps = 1;        // including t = s
  double u_model = kNegInf;
  double min_gap = std::numeric_limits<double>::infinity();
};

RootModel root_model(std::span<const cplx> T, int n, double log_delta, std::uint32_t s, double log_eps) {
  RootModel rm;
  rm.zero_gaps = 0;
  std::vector<double> logs;
  for (std::uint32_t t = 0; t < (1u << n); ++t) {
    const cplx d = branch_gap(s, n, t, n, T);
    if (std::abs(d) == 0.0) {
      ++rm.zero_gaps;
      continue;
    }
    rm.gaps.push_back(d);
    logs.push_back(std::log(std::abs(d)));
    rm.min_gap = std::min(rm.min_gap, logs.back());
  }
  std::sort(logs.begin(), logs.end());
  // M(u) = log δ + Σ_t max(log|g_t|, u) is increasing and piecewise linear.
  double fixed = log_delta;
  for (double g : logs) fixed += g;
  for (std::size_t i = 0;; ++i) {
    const int k = rm.zero_gaps + int(i);
    const double u = (log_eps - fixed) / double(k);
    const double lo = i == 0 ? kNegInf : logs[i - 1];
    const double hi = i < logs.size() ? logs[i] : std::numeric_limits<double>::infinity();
    if (u >= lo && u <= hi) {
      rm.u_model = u;
      break;
    }
    if (i == logs.size()) break;
    fixed -= logs[i];
  }
  return rm;
}

// G(u) = log|p_n(h_s + e^{u+iθ})| − log ε and its u-derivative.
std::pair<double, double> crossing_value(const RootModel& rm, double log_delta, double log_eps, double u, double theta) {
  double g = log_delta + rm.zero_gaps * u - log_eps, dg = rm.zero_gaps;
  const cplx x = std::polar(1.0, theta);
  for (const cplx& d : rm.gaps) {
    g += log_abs_sum(d, u, x);
    const double rel = u - std::log(std::abs(d));
    if (rel < -30.0) continue;
    if (rel > 30.0) {
      dg += 1.0;
      continue;
    }
    const cplx xx = std::exp(rel) * x * std::abs(d) / d;  // x / d
    dg += std::real(xx / (1.0 + xx));
  }
  return {g, dg};
}

std::optional<double> solve_crossing(const RootModel& rm, double log_delta, double log_eps, double theta, double u_max,
                                     int n) {
  if (rm.u_model == kNegInf) return std::nullopt;
  double a = rm.u_model - (double(1u << n) * std::numbers::ln2 + 1.0);  // G(a) ≤ −1
  double b = rm.u_model + 1.0;
  auto [gb, db] = crossing_value(rm, log_delta, log_eps, b, theta);
  while (gb <= 0.0) {
    a = b;
    b += 1.0;
    if (b > u_max) return std::nullopt;
    std::tie(gb, db) = crossing_value(rm, log_delta, log_eps, b, theta);
  }
  double u = std::clamp(rm.u_model, a, b);
  for (int it = 0; it < 80; ++it) {
    const auto [g, dg] = crossing_value(rm, log_delta, log_eps, u, theta);
    if (g == 0.0) return u;
    (g < 0.0 ? a : b) = u;
    double next = u - g / dg;
    if (!(dg > 0.0) || !(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - u) < 1e-12 * std::max(1.0, std::abs(u)) || b - a < 1e-12) return next;
    u = next;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::optional<double> sublevel_crossing(std::span<const cplx> T, int n, double log_delta, std::uint32_t s,
                                        double theta, double log_eps, double u_max) {
  return solve_crossing(root_model(T, n, log_delta, s, log_eps), log_delta, log_eps, theta, u_max, n);
}

SublevelSamples sublevel_samples(std::span<const cplx> T, int n, double log_delta, double log_eps, int rays,
                                 bool with_interior) {
  SublevelSamples out;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t s = 0; s < count; ++s) {
    const RootModel rm = root_model(T, n, log_delta, s, log_eps);
    if (rm.u_model == kNegInf) continue;
    // Far below every gap the component is a round disk to ~1e-6; one
    // Newton step fixes its radius for all rays.
    std::optional<double> shared;
    if (rm.u_model < rm.min_gap - 14.0) {
      const auto [g, dg] = crossing_value(rm, log_delta, log_eps, rm.u_model, 0.0);
      shared = rm.u_model - g / dg;
    }
    for (int k = 0; k < rays; ++k) {
      const double theta = 2.0 * std::numbers::pi * (k + 0.5) / rays;
      const auto u = shared ? shared : solve_crossing(rm, log_delta, log_eps, theta, 12.0, n);
      if (!u) continue;
      out.boundary.push_back({n, s, *u, theta});
      if (with_interior) out.interior.push_back({n, s, *u - std::numbers::ln2, theta});
    }
  }
  return out;
}

}  // namespace wermer
