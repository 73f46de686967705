#include "wermer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wermer/errors.hpp"
#include "wermer/grid.hpp"

namespace wermer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_stage(const Construction& con, int N) {
  if (N < 1 || N > con.built()) throw Error(ErrorKind::Usage, "stage " + std::to_string(N) + " not built");
}

bool in_sublevel(const Construction& con, std::span<const cplx> T, const FiberPoint& pt, int from, int to) {
  for (int j = from; j <= to; ++j) {
    const Stage& s = con.stage(j);
    if (log_abs_p(T, j, s.log_delta, pt) > s.log_eps()) return false;
  }
  return true;
}

std::vector<cplx> excluded_points(const Construction& con, int k) {
  std::vector<cplx> pts;
  for (int j = 0; j < k; ++j) pts.push_back(con.table[j]);
  if (k >= 2 && con.stage(k - 1).Z)
    for (const auto& [r, m] : con.stage(k - 1).Z->roots) pts.push_back(r);
  return pts;
}

// Continues √(z − a_j), j = 1..k, along z(φ) = c + r e^{iφ} between two
// angles (either direction), returning the end values.
std::vector<cplx> continue_radicals(const StageFunctionSet& fs, int k, cplx c, double r, double from, double to,
                                    std::vector<cplx> v, int steps) {
  for (int i = 1; i <= steps; ++i) {
    const double phi = from + (to - from) * double(i) / steps;
    const cplx z = c + std::polar(r, phi);
    for (int j = 0; j < k; ++j) {
      const cplx q = std::sqrt(z - fs.a[j]);
      v[j] = std::abs(q - v[j]) <= std::abs(q + v[j]) ? q : -q;
    }
  }
  return v;
}

// h_s from continued radical values at z.
cplx branch_with_radicals(const StageFunctionSet& fs, int k, std::uint32_t s, cplx z, const std::vector<cplx>& rad) {
  cplx prefix = 1.0, h = 0.0;
  for (int j = 0; j < k; ++j) {
    const cplx t = fs.c[j] * fs.Z[j](z) * prefix * rad[j];
    h += ((s >> j) & 1u) ? -t : t;
    prefix *= z - fs.a[j];
  }
  return h;
}

}  // namespace

int membership_index(cplx z) { return std::max(1, int(std::floor(std::abs(z)))); }

FiberReport fiber(const Construction& con, cplx z0, int N, int rays) {
  require_stage(con, N);
  const StageFunctionSet fs = con.functions(N);
  const auto T = fs.terms(z0);
  const Stage& st = con.stage(N);
  FiberReport rep;
  rep.z0 = z0;
  rep.N = N;
  rep.roots.roots = branch_values(T);
  rep.roots.multiplicities.assign(rep.roots.roots.size(), 1);
  rep.roots.cluster_tol = 0.0;
  rep.min_pair_gap = kInf;
  for (std::uint32_t s = 0; s < (1u << N); ++s)
    for (std::uint32_t t = s + 1; t < (1u << N); ++t)
      rep.min_pair_gap = std::min(rep.min_pair_gap, std::abs(branch_gap(s, N, t, N, T)));

  const int from = std::min(membership_index(z0), N);
  auto keep = [&](const FiberPoint& pt) {
    if (!in_sublevel(con, T, pt, from, N)) return;
    rep.sublevel_samples.push_back({pt, pt.value(T)});
    rep.hausdorff_root_to_sublevel = std::max(rep.hausdorff_root_to_sublevel, std::exp(log_root_distance(T, N, pt)));
  };
  const auto rs = sublevel_samples(T, N, st.log_delta, st.log_eps(), rays, true);
  for (const auto& pt : rs.boundary) keep(pt);
  for (const auto& pt : rs.interior) keep(pt);
  for (const cplx& w : disk_lattice(st.rho, con.config.w_grid)) keep(FiberPoint::plain(w));
  return rep;
}

PotentialSample potential(const Construction& con, cplx z, const FiberPoint& w, int N) {
  require_stage(con, N);
  if (N < 2) throw Error(ErrorKind::Usage, "potential needs N ≥ 2");
  const auto T = con.functions(N).terms(z);
  PotentialSample out;
  out.z = z;
  out.w = w.value(T);
  out.N = N;
  for (int n = 2; n <= N; ++n) {
    const Stage& s = con.stage(n);
    const double term = log_abs_p(T, n, s.log_delta, w) / s.m;
    if (term < -1.0) ++out.clamped_terms;
    out.value += std::max(term, -1.0);
  }
  return out;
}

PotentialSample potential(const Construction& con, cplx z, cplx w, int N) {
  return potential(con, z, FiberPoint::plain(w), N);
}

void validate_probe(const Construction& con, const CircleProbe& probe) {
  require_stage(con, probe.k);
  if (!(probe.radius > 0.0) || probe.samples < 8) throw Error(ErrorKind::ProbeInvalid, "bad circle");
  const double spacing = 2.0 * std::numbers::pi * probe.radius / probe.samples;
  for (const cplx& p : excluded_points(con, probe.k))
    if (std::abs(std::abs(p - probe.center) - probe.radius) < 10.0 * spacing)
      throw Error(ErrorKind::ProbeInvalid, "circle passes too close to an excluded point");
}

CircleProbe random_probe(const Construction& con, int k, std::mt19937_64& rng, int samples) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double rc = (k + 0.5) * std::sqrt(unit(rng));
    const cplx c = std::polar(rc, 2.0 * std::numbers::pi * unit(rng));
    const CircleProbe p{c, 0.05 + 0.45 * unit(rng), k, samples};
    try {
      validate_probe(con, p);
      return p;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::SearchExhausted, "no valid probe found");
}

double separation_check(const Construction& con, const CircleProbe& probe) {
  validate_probe(con, probe);
  const int k = probe.k;
  const StageFunctionSet fs = con.functions(k);
  double worst = kInf;
  std::vector<cplx> T(k);
  for (const cplx& z : circle_points(probe.center, probe.radius, probe.samples)) {
    fs.terms(z, T);
    const double ref = std::abs(T[k - 1]);
    for (std::uint32_t s = 0; s < (1u << k); ++s)
      for (std::uint32_t t = s + 1; t < (1u << k); ++t) worst = std::min(worst, std::abs(branch_gap(s, k, t, k, T)) / ref);
  }
  return worst;
}

double shadow_check(const Construction& con, cplx z0, int N, int k) {
  require_stage(con, N);
  if (k < 1 || k > N) throw Error(ErrorKind::Usage, "shadow_check needs 1 ≤ k ≤ N");
  const auto T = con.functions(N).terms(z0);
  const double ref = std::abs(T[k - 1]);
  double worst = 0.0;
  for (std::uint32_t s = 0; s < (1u << N); ++s) {
    double best = kInf;
    for (std::uint32_t t = 0; t < (1u << k); ++t) best = std::min(best, std::abs(branch_gap(s, N, t, k, T)));
    worst = std::max(worst, best / ref);
  }
  return worst;
}

double shadow_check_sublevel(const Construction& con, cplx z0, int N, int k, int rays) {
  require_stage(con, N);
  if (k < 1 || k > N) throw Error(ErrorKind::Usage, "shadow_check needs 1 ≤ k ≤ N");
  const auto T = con.functions(N).terms(z0);
  const Stage& st = con.stage(N);
  const double log_ref = std::log(std::abs(T[k - 1]));
  double worst = 0.0;
  for (const auto& pt : sublevel_samples(T, N, st.log_delta, st.log_eps(), rays, false).boundary)
    worst = std::max(worst, std::exp(log_root_distance(T, k, pt) - log_ref));
  return worst;
}

std::optional<cplx> cut_crossing(const Construction& con, const CircleProbe& probe) {
  const auto cuts = make_cuts(con.table, probe.k);
  const Cut& cut = cuts[probe.k - 1];
  const cplx q = cut.base - probe.center;
  // |q + t d|² = r², t ≥ 0.
  const double b = std::real(std::conj(cut.direction) * q);
  const double disc = b * b - (std::norm(q) - probe.radius * probe.radius);
  if (disc <= 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  for (double t : {-b - s, -b + s})
    if (t >= 0.0) return cut.base + t * cut.direction;
  return std::nullopt;
}

std::pair<double, double> jump_check(const Construction& con, const CircleProbe& probe, cplx z1) {
  validate_probe(con, probe);
  const int k = probe.k;
  if (std::abs(std::abs(z1 - probe.center) - probe.radius) > 1e-9 * std::max(1.0, probe.radius))
    throw Error(ErrorKind::ProbeInvalid, "z1 is not on the circle");
  const StageFunctionSet fs = con.functions(k);
  const double phi1 = std::arg(z1 - probe.center);
  double min_dist = kInf;
  for (int j = 0; j < k; ++j) min_dist = std::min(min_dist, std::abs(std::abs(fs.a[j] - probe.center) - probe.radius));
  const int steps = std::max(4096, int(std::ceil(2.0 * std::numbers::pi * probe.radius / (0.02 * min_dist))));
  const double d0 = 1e-3;
  const int levels = 24;

  // Start just past z1 with the principal-cut values, then continue.
  std::vector<cplx> start(k);
  const cplx zs = probe.center + std::polar(probe.radius, phi1 + d0);
  for (int j = 0; j < k; ++j) start[j] = sqrt_cut(zs - fs.a[j], fs.cuts[j].direction);

  // Approaches z1 from φ1 + 0 (sign +) or from φ1 + 2π − 0 (sign −).
  auto one_sided = [&](std::vector<cplx> rad, double phi_from, double sign) {
    const double base = sign > 0 ? phi1 : phi1 + 2.0 * std::numbers::pi;
    // Values at φ1 ± d0 2^{-m}, then Richardson on the last two.
    std::vector<std::vector<cplx>> h;
    double phi = phi_from;
    for (int m = 0; m <= levels; ++m) {
      const double target = base + sign * d0 * std::ldexp(1.0, -m);
      rad = continue_radicals(fs, k, probe.center, probe.radius, phi, target, rad, 16);
      phi = target;
      const cplx z = probe.center + std::polar(probe.radius, phi);
      std::vector<cplx> vals;
      for (std::uint32_t s = 0; s < (1u << k); ++s) vals.push_back(branch_with_radicals(fs, k, s, z, rad));
      h.push_back(std::move(vals));
    }
    std::vector<cplx> lim(h.back().size());
    for (std::size_t s = 0; s < lim.size(); ++s) lim[s] = 2.0 * h[levels][s] - h[levels - 1][s];
    return lim;
  };
  const auto plus = one_sided(start, phi1 + d0, 1.0);
  const auto around = continue_radicals(fs, k, probe.center, probe.radius, phi1 + d0,
                                        phi1 + 2.0 * std::numbers::pi - d0, start, steps);
  const auto minus = one_sided(around, phi1 + 2.0 * std::numbers::pi - d0, -1.0);

  double jump = kInf;
  for (std::size_t s = 0; s < plus.size(); ++s) jump = std::min(jump, std::abs(plus[s] - minus[s]));
  const double ref = 2.0 * std::abs(fs.c[k - 1] * fs.Z[k - 1](z1) * beta_eval(k, z1, fs.cuts));
  return {jump, ref};
}

SubharmonicReport sub_mean_value(const std::function<double(cplx)>& M, const std::vector<cplx>& centers,
                                 const std::vector<double>& radii, int nodes, double tol) {
  nodes = std::max(nodes, 64);
  SubharmonicReport rep;
  for (const cplx& c : centers) {
    const double mc = M(c);
    for (double r : radii) {
      double mean = 0.0;
      for (const cplx& z : circle_points(c, r, nodes)) mean += M(z);
      mean /= nodes;
      const double excess = mc - mean;
      ++rep.checks;
      if (excess > tol) ++rep.violations;
      if (excess > rep.worst_excess) rep.worst_excess = excess, rep.worst_center = c;
    }
  }
  return rep;
}

double fiber_max_potential(const Construction& con, cplx z, int N) {
  double best = -kInf;
  for (std::uint32_t s = 0; s < (1u << N); ++s) best = std::max(best, potential(con, z, FiberPoint::root(N, s), N).value);
  return best;
}

SubharmonicReport fiber_max_subharmonicity(const Construction& con, const std::vector<cplx>& centers, int N,
                                           const std::vector<double>& radii, int nodes, double tol) {
  require_stage(con, N);
  return sub_mean_value([&](cplx z) { return fiber_max_potential(con, z, N); }, centers, radii, nodes, tol);
}

PlaneSampler segment_sampler(cplx a, cplx b, int count) {
  return [=] {
    std::vector<cplx> out;
    for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * (count == 1 ? 0.0 : double(i) / (count - 1)));
    return out;
  };
}

PlaneSampler circle_sampler(cplx center, double radius, int count) {
  return [=] { return circle_points(center, radius, count); };
}

PlaneSampler disk_sampler(cplx center, double radius, double density) {
  return [=] {
    auto pts = disk_lattice(radius, density);
    for (auto& p : pts) p += center;
    return pts;
  };
}

std::vector<CloudPoint> extract_E(const Construction& con, const PlaneSampler& sampler, int N) {
  require_stage(con, N);
  const StageFunctionSet fs = con.functions(N);
  std::vector<CloudPoint> cloud;
  for (const cplx& s : sampler())
    for (const cplx& w : branch_values(fs.terms(s))) cloud.push_back({s, w});
  return cloud;
}

}  // namespace wermer
