#include "wermer/construction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "wermer/collision.hpp"
#include "wermer/errors.hpp"
#include "wermer/grid.hpp"
#include "wermer/root_finding.hpp"

namespace wermer {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kHardStageCap = 4;

struct Worst {
  double margin = kInf;
  cplx z = 0.0, w = 0.0;
  std::size_t samples = 0;
  void add(double m, cplx zz, cplx ww) {
    ++samples;
    if (std::isnan(m)) m = -kInf;
    if (m < margin) margin = m, z = zz, w = ww;
  }
  VerificationReport report(int stage, Predicate p) const {
    VerificationReport r;
    r.stage = stage;
    r.predicate = p;
    r.worst_margin = samples ? margin : -kInf;
    r.worst_z = z;
    r.worst_w = w;
    r.samples = samples;
    r.pass = r.worst_margin >= 0.0;
    return r;
  }
};

VerificationReport not_applicable(int stage, Predicate p) {
  VerificationReport r;
  r.stage = stage;
  r.predicate = p;
  r.applicable = false;
  return r;
}

// Everything needed to evaluate log|p_k| in product form.
struct Level {
  int n;
  double log_delta;
  double log_eps;
};

Level level_of(const Stage& s) { return {s.n, s.log_delta, s.log_eps()}; }

double es11_bound(int n) { return n <= 1 ? 1.0 : 1.0 / double(n - 1); }

// Σ_j |T_j| on |z| = radius, a bound for every branch modulus inside.
double branch_modulus_sup(const StageFunctionSet& fs, double radius) {
  double sup = 0.0;
  for (const cplx& z : circle_points(0.0, radius, 4096)) {
    double s = 0.0;
    for (const auto& t : fs.terms(z)) s += std::abs(t);
    sup = std::max(sup, s);
  }
  return sup * (1.0 + 1e-3);
}

double rho_for(const StageFunctionSet& fs, double radius, const Level& lv, double rho_prev, double margin) {
  const double spread = std::exp((lv.log_eps - lv.log_delta) / double(1 << lv.n));
  return std::max(rho_prev + 1.0 + margin, branch_modulus_sup(fs, radius) + spread + margin);
}

// ES11 worst margin over the stage-lv sublevel boundary in D_radius.
Worst es11_sweep(const StageFunctionSet& fs, const Level& lv, double radius, double density, int rays) {
  Worst worst;
  const double log_bound = std::log(es11_bound(lv.n));
  std::vector<cplx> T(fs.n);
  for (const cplx& z : disk_lattice(radius, density)) {
    fs.terms(z, T);
    for (const auto& pt : sublevel_samples(T, lv.n, lv.log_delta, lv.log_eps, rays, false).boundary)
      worst.add(log_bound - log_root_distance(T, lv.n, pt), z, pt.value(T));
  }
  return worst;
}

std::int64_t stage1_eps(const StageFunctionSet& fs, const GridConfig& cfg) {
  const double slack = selection_slack(cfg);
  for (std::int64_t t = 0; t < 200; ++t) {
    const Level lv{1, 0.0, -double(t) * kLn2};
    if (es11_sweep(fs, lv, 2.0, cfg.z_grid, cfg.rays).margin >= slack) return t;
  }
  throw Error(ErrorKind::SearchExhausted, "no admissible ε_1");
}

// C1 worst margin for the roots of g_{n+1} (T has n+1 entries) against p_n.
Worst c1_sweep(const Level& lv, double density, double slack,
               const std::function<void(cplx, std::span<cplx>)>& terms) {
  Worst worst;
  const int n = lv.n;
  std::vector<cplx> T(n + 1);
  const double target = lv.log_eps - kLn2;
  for (const cplx& z : disk_lattice(n + 1.0, density)) {
    terms(z, T);
    for (std::uint32_t s = 0; s < (1u << (n + 1)); ++s) {
      const FiberPoint pt = FiberPoint::root(n + 1, s);
      worst.add(target - log_abs_p(T, n, lv.log_delta, pt) - slack, z, pt.value(T));
    }
  }
  return worst;
}

// Sample set for ES4 / select_m: exterior of the stage-lv sublevel set in
// B_{n+1}.  On that region log|p_{n+1}| is harmonic in w (its zeros sit
// inside the sublevel set), so the minimum sits on the sublevel boundary or
// on |w| = ρ_{n+1}.  The outer circle enters through the lower bound
// log δ + Σ_t log(ρ − |h_t|), returned separately.
template <class F>
void exterior_boundary(std::span<const cplx> T, const Level& lv, int rays, F&& f) {
  for (const auto& pt : sublevel_samples(T, lv.n, lv.log_delta, lv.log_eps, rays, false).boundary)
    f(FiberPoint{pt.anchor_len, pt.anchor, pt.log_r + 1e-9, pt.theta});
}

double outer_circle_bound(std::span<const cplx> T, int N, double log_delta, double rho) {
  double s = log_delta;
  for (std::uint32_t t = 0; t < (1u << N); ++t) {
    const double gap = rho - std::abs(branch_from_terms(t, T.first(N)));
    if (!(gap > 0.0)) return -kInf;
    s += std::log(gap);
  }
  return s;
}

int outer_count(double rho, double w_grid) { return std::max(64, int(std::ceil(2.0 * std::numbers::pi * rho * w_grid))); }

}  // namespace

std::string to_string(Mode m) { return m == Mode::Wermer ? "wermer" : "modified"; }

Mode parse_mode(const std::string& s) {
  if (s == "wermer") return Mode::Wermer;
  if (s == "modified") return Mode::Modified;
  throw Error(ErrorKind::Usage, "mode must be wermer or modified, got '" + s + "'");
}

std::string to_string(Predicate p) {
  switch (p) {
    case Predicate::P1: return "P1";
    case Predicate::P2: return "P2";
    case Predicate::C1: return "C1";
    case Predicate::C2: return "C2";
    case Predicate::XXX: return "XXX";
    case Predicate::ES4: return "ES4";
    case Predicate::ES1: return "ES1";
    case Predicate::ES11: return "ES11";
    case Predicate::LEV1: return "LEV1";
  }
  return "?";
}

Predicate parse_predicate(const std::string& s) {
  for (Predicate p : kAllPredicates)
    if (to_string(p) == s) return p;
  throw Error(ErrorKind::SchemaMismatch, "unknown predicate '" + s + "'");
}

double selection_slack(const GridConfig& cfg) { return 0.25 * std::log(1.0 / cfg.margin); }

double Stage::log_eps() const { return -double(eps_exp) * kLn2; }

StageFunctionSet Construction::functions(int n) const {
  StageFunctionSet fs;
  fs.n = n;
  fs.cuts = make_cuts(table, n);
  fs.Z.push_back(ZPoly{});
  for (int k = 1; k <= n; ++k) {
    const Stage& s = stage(k);
    fs.c.push_back(s.c);
    fs.a.push_back(table[k - 1]);
    if (k < n) {
      if (!s.Z) throw Error(ErrorKind::InvariantViolation, "Z_" + std::to_string(k) + " not computed");
      fs.Z.push_back(*s.Z);
    }
  }
  return fs;
}

bool Construction::all_pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

Construction make_construction(Mode mode, const GridConfig& cfg) {
  if (!(cfg.margin > 0.0 && cfg.margin <= 0.5)) throw Error(ErrorKind::Usage, "margin must lie in (0, 1/2]");
  if (cfg.z_grid <= 0 || cfg.w_grid <= 0 || cfg.rays < 1) throw Error(ErrorKind::Usage, "grid densities must be positive");
  Construction con;
  con.mode = mode;
  con.config = cfg;
  con.table = enumerate_branch_points(kHardStageCap + 2);
  con.stages.push_back(init_stage1(con.table, cfg, mode));
  auto r = verify_stage(con, 1);
  con.reports.insert(con.reports.end(), r.begin(), r.end());
  return con;
}

Stage init_stage1(const BranchPointTable& table, const GridConfig& cfg, Mode mode) {
  if (table.size() < 2) throw Error(ErrorKind::Degenerate, "init_stage1 needs two branch points");
  Stage s;
  s.n = 1;
  s.c = mode == Mode::Wermer ? 0.1 : 1.0;
  s.m = 1;
  s.log_delta = 0.0;
  const mp_cplx a1 = scalar_from<mp_cplx>(table[0]);
  const mp_cplx c2 = mp_cplx(s.c) * mp_cplx(s.c);
  typename BiPoly<mp_cplx>::Matrix t = BiPoly<mp_cplx>::Matrix::Constant(2, 3, mp_cplx(0));
  t(0, 0) = c2 * a1;
  t(1, 0) = -c2;
  t(0, 2) = mp_cplx(1);
  s.p = BiPoly<mp_cplx>(t);
  s.Z = ZPoly{};

  StageFunctionSet fs;
  fs.n = 1;
  fs.c = {s.c};
  fs.Z = {ZPoly{}};
  fs.a = {table[0]};
  fs.cuts = make_cuts(table, 1);
  s.eps_exp = stage1_eps(fs, cfg);
  s.rho = rho_for(fs, 2.0, level_of(s), 0.0, cfg.margin);
  return s;
}

double analytic_c_cap(const StageFunctionSet& fs, const ZPoly& Zn, const Cut& cut_next) {
  const int n = fs.n;
  std::vector<Cut> cuts = fs.cuts;
  cuts.push_back(cut_next);
  double inf_ratio = kInf;
  for (const cplx& z : circle_points(0.0, n + 1.0, 8192, 0.25)) {
    const double num = std::abs(fs.Z[n - 1](z) * beta_eval(n, z, cuts));
    const double den = std::abs(Zn(z) * beta_eval(n + 1, z, cuts));
    inf_ratio = std::min(inf_ratio, num / den);
  }
  return fs.c[n - 1] / 10.0 * inf_ratio;
}

double select_c(const Construction& con, int n, const ZPoly& Zn) {
  const GridConfig& cfg = con.config;
  const double slack = selection_slack(cfg);
  StageFunctionSet fs = con.functions(n);
  const auto cuts_next = make_cuts(con.table, n + 1);
  const Cut cut_next = cuts_next[n];

  // T_{n+1} with unit coefficient: Z_n B_{n+1}.
  StageFunctionSet unit = fs;
  unit.n = n + 1;
  unit.c.push_back(1.0);
  unit.Z.push_back(Zn);
  unit.a.push_back(con.table[n]);
  unit.cuts = cuts_next;

  const double log_cap = con.mode == Mode::Wermer
                             ? std::log(fs.c[n - 1] / 10.0)
                             : std::log(cfg.margin * analytic_c_cap(fs, Zn, cut_next));
  const auto lattice = disk_lattice(n + 1.0, cfg.z_grid);

  // (XXX) is linear in log c: log min gap − log 2|Z_n B_{n+1}| ≥ log c + slack.
  double log_c_xxx = kInf;
  if (con.mode == Mode::Modified) {
    std::vector<cplx> T(n + 1);
    for (const cplx& z : lattice) {
      unit.terms(z, T);
      double min_gap = kInf;
      for (std::uint32_t s = 0; s < (1u << n); ++s)
        for (std::uint32_t t = s + 1; t < (1u << n); ++t)
          min_gap = std::min(min_gap, std::abs(branch_gap(s, n, t, n, T)));
      log_c_xxx = std::min(log_c_xxx, std::log(min_gap) - std::log(2.0 * std::abs(T[n])) - slack);
    }
  }
  std::int64_t k = 0;
  if (log_cap > log_c_xxx) k = std::int64_t(std::ceil((log_cap - log_c_xxx) / kLn2));

  const Level lv = level_of(con.stage(n));
  for (int round = 0; round < 60; ++round) {
    const double log_c = log_cap - double(k) * kLn2;
    const double c = std::exp(log_c);
    if (!(c > 0.0)) break;
    auto terms = [&](cplx z, std::span<cplx> T) {
      unit.terms(z, T);
      T[n] *= c;
    };
    const Worst w = c1_sweep(lv, cfg.z_grid, slack, terms);
    if (w.margin >= 0.0) return c;
    k += std::max<std::int64_t>(1, std::int64_t(std::ceil(-w.margin / kLn2)));
  }
  throw Error(ErrorKind::SearchExhausted, "select_c: no admissible c_" + std::to_string(n + 1));
}

double select_rho(const Construction& con, int n) {
  const Stage& s = con.stage(n);
  return rho_for(con.functions(n), n + 2.0, level_of(s), s.rho, con.config.margin);
}

UniPoly<mp_cplx> radicand(const ZPoly& Zn, const BranchPointTable& table, int n) {
  std::vector<std::pair<cplx, int>> roots;
  for (const auto& [r, m] : Zn.roots) roots.push_back({r, 2 * m});
  for (int l = 0; l < n; ++l) roots.push_back({table[l], 2});
  roots.push_back({table[n], 1});
  return UniPoly<mp_cplx>::from_roots(roots);
}

NextPoly build_p_next(const Construction& con, int n, double c, const ZPoly& Zn, double rho_next) {
  const Stage& s = con.stage(n);
  const auto pc = shift_product(s.p, mp_cplx(c), radicand(Zn, con.table, n));
  StageFunctionSet fs = con.functions(n);
  fs.n = n + 1;
  fs.c.push_back(c);
  fs.Z.push_back(Zn);
  fs.a.push_back(con.table[n]);
  fs.cuts = make_cuts(con.table, n + 1);
  // sup over the bidisk is a sup over the torus |z| = n+2, |w| = ρ_{n+2}.
  double sup_log = -kInf;
  const auto ws = circle_points(0.0, rho_next, outer_count(rho_next, con.config.w_grid), 0.5);
  std::vector<cplx> T(n + 1);
  for (const cplx& z : circle_points(0.0, n + 2.0, int(64 * (n + 2)), 0.5)) {
    fs.terms(z, T);
    for (const cplx& w : ws) sup_log = std::max(sup_log, log_abs_p(T, n + 1, 0.0, FiberPoint::plain(w)));
  }
  const double delta = std::exp(std::log(con.config.margin) - sup_log);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::NumericRange, "δ out of double range");
  return {mp_cplx(delta) * pc, std::log(delta)};
}

int m_from_min_log(double min_log, int n) {
  const double need = std::ldexp(std::max(0.0, -min_log), n);
  return std::max(1, int(std::ceil(need)));
}

int select_m(const Construction& con, int n, const StageFunctionSet& fs_next, double log_delta_next) {
  const GridConfig& cfg = con.config;
  const Stage& s = con.stage(n);
  const Level lv = level_of(s);
  double min_log = kInf;
  std::size_t count = 0;
  std::vector<cplx> T(n + 1);
  for (const cplx& z : disk_lattice(n + 1.0, cfg.z_grid)) {
    fs_next.terms(z, T);
    exterior_boundary(T, lv, cfg.rays, [&](const FiberPoint& pt) {
      ++count;
      min_log = std::min(min_log, log_abs_p(T, n + 1, log_delta_next, pt));
    });
    min_log = std::min(min_log, outer_circle_bound(T, n + 1, log_delta_next, s.rho));
  }
  if (count == 0) throw Error(ErrorKind::EmptyExterior, "no exterior samples in B_" + std::to_string(n + 1));
  return m_from_min_log(min_log + std::log(cfg.margin), n);
}

std::int64_t select_eps(const Construction& con, int n, const StageFunctionSet& fs_next, double log_delta_next,
                        int m_next) {
  const GridConfig& cfg = con.config;
  const double slack = selection_slack(cfg);
  const Stage& prev = con.stage(n);
  const Level lv_prev = level_of(prev);
  const int N = n + 1;
  auto worst_at = [&](std::int64_t e) {
    const Level lv{N, log_delta_next, -double(e) * kLn2};
    double worst = es11_sweep(fs_next, lv, N + 1.0, cfg.z_grid, cfg.rays).margin;
    std::vector<cplx> T(N);
    for (const cplx& z : disk_lattice(double(N), cfg.z_grid)) {
      fs_next.terms(z, T);
      for (const auto& pt : sublevel_samples(T, N, lv.log_delta, lv.log_eps, cfg.rays, false).boundary)
        worst = std::min(worst, lv_prev.log_eps - log_abs_p(T, n, lv_prev.log_delta, pt));
    }
    return worst - slack;
  };
  // (es1): ε ≤ e^{−m} with slack.
  const std::int64_t start =
      std::max<std::int64_t>(prev.eps_exp + 1, std::int64_t(std::ceil((m_next + slack) / kLn2)));
  std::int64_t bad = start - 1, good = start, step = 1;
  while (!(worst_at(good) >= 0.0)) {
    bad = good;
    good += step;
    step *= 2;
    if (good - start > 200) throw Error(ErrorKind::SearchExhausted, "select_eps: 200 halvings");
  }
  while (good - bad > 1) {
    const std::int64_t mid = bad + (good - bad) / 2;
    (worst_at(mid) >= 0.0 ? good : bad) = mid;
  }
  return good;
}

Construction advance(const Construction& con) {
  const int n = con.built();
  if (n >= std::min(con.config.max_stage, kHardStageCap))
    throw Error(ErrorKind::NumericRange, "stage cap " + std::to_string(std::min(con.config.max_stage, kHardStageCap)) + " reached");
  Construction next = con;
  ZPoly Zn;
  if (n >= 2 && con.mode == Mode::Modified) Zn = compute_Z(n, next.functions(n));
  next.stages[n - 1].Z = Zn;
  const double c = select_c(next, n, Zn);
  const double rho = select_rho(next, n);
  NextPoly np = build_p_next(next, n, c, Zn, rho);

  Stage s;
  s.n = n + 1;
  s.c = c;
  s.log_delta = np.log_delta;
  s.rho = rho;
  s.p = std::move(np.p);
  s.eps_exp = next.stage(n).eps_exp + 1;
  next.stages.push_back(s);
  const StageFunctionSet fs_next = next.functions(n + 1);
  Stage& added = next.stages.back();
  added.m = select_m(next, n, fs_next, added.log_delta);
  added.eps_exp = select_eps(next, n, fs_next, added.log_delta, added.m);
  if (con.mode == Mode::Wermer) added.Z = ZPoly{};
  auto r = verify_stage(next, n + 1);
  next.reports.insert(next.reports.end(), r.begin(), r.end());
  return next;
}

Construction build(Mode mode, const GridConfig& cfg, int stages) {
  Construction con = make_construction(mode, cfg);
  while (con.built() < stages) con = advance(con);
  return con;
}

Lev1Diagnostic lev1_from_log_eps(const std::vector<double>& log_eps) {
  Lev1Diagnostic d;
  for (std::size_t k = 0; k < log_eps.size(); ++k) d.log_values.push_back(std::ldexp(log_eps[k], -int(k + 1)));
  d.decreasing = d.log_values.size() >= 2;
  for (std::size_t k = 1; k < d.log_values.size(); ++k)
    if (!(d.log_values[k] < d.log_values[k - 1])) d.decreasing = false;
  return d;
}

Lev1Diagnostic check_lev1(const Construction& con) {
  std::vector<double> le;
  for (const auto& s : con.stages) le.push_back(s.log_eps());
  return lev1_from_log_eps(le);
}

}  // namespace wermer

namespace wermer {

namespace {

double multiset_error(std::vector<cplx> dense, std::vector<cplx> branches) {
  double worst = 0.0;
  for (const cplx& x : dense) {
    auto it = std::min_element(branches.begin(), branches.end(),
                               [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    branches.erase(it);
  }
  return worst;
}

}  // namespace

std::vector<VerificationReport> verify_stage(const Construction& con, int N) {
  const GridConfig& cfg = con.config;
  const double density = cfg.z_grid * cfg.verify_factor;
  const int rays = int(std::lround(cfg.rays * cfg.verify_factor));
  const Stage& st = con.stage(N);
  const Level lv = level_of(st);
  const StageFunctionSet fs = con.functions(N);
  const bool modified = con.mode == Mode::Modified;

  Worst p1, p2, c1, c2, xxx, es4, es1, es11, lev1;
  const auto lattice = disk_lattice(N + 1.0, density);

  for (const cplx& z : subsample(lattice, std::size_t(cfg.p1_samples))) {
    const auto rs = roots_in_w(st.p, scalar_from<mp_cplx>(z), 0.0);
    std::vector<cplx> dense;
    for (const auto& r : rs.roots) dense.push_back(to_cplx(r));
    const auto err = multiset_error(dense, branch_values(fs.terms(z)));
    p1.add(std::log(1e-8) - std::log(err), z, 0.0);
  }

  const double log_bound = std::log(es11_bound(N));
  std::vector<cplx> T(N);
  if (N == 1) {
    for (const cplx& z : lattice) {
      fs.terms(z, T);
      for (const auto& pt : sublevel_samples(T, N, lv.log_delta, lv.log_eps, rays, false).boundary)
        es11.add(log_bound - log_root_distance(T, N, pt), z, pt.value(T));
    }
    std::vector<VerificationReport> out{p1.report(N, Predicate::P1)};
    for (Predicate p : {Predicate::P2, Predicate::C1, Predicate::C2, Predicate::XXX, Predicate::ES4, Predicate::ES1})
      out.push_back(not_applicable(N, p));
    out.push_back(es11.report(N, Predicate::ES11));
    out.push_back(not_applicable(N, Predicate::LEV1));
    return out;
  }

  const Stage& prev = con.stage(N - 1);
  const Level lp = level_of(prev);
  const int n = N - 1;
  const double es4_floor = std::ldexp(1.0, -n);
  for (const cplx& z : lattice) {
    fs.terms(z, T);
    const bool inner = std::abs(z) < double(N);
    const auto samples = sublevel_samples(T, N, lv.log_delta, lv.log_eps, rays, false);
    for (const auto& pt : samples.boundary) {
      const double lp_here = log_abs_p(T, N, lv.log_delta, pt);
      es1.add(-1.0 - lp_here / st.m, z, pt.value(T));
      es11.add(log_bound - log_root_distance(T, N, pt), z, pt.value(T));
      if (inner) p2.add(lp.log_eps - log_abs_p(T, n, lp.log_delta, pt), z, pt.value(T));
    }
    if (!inner) continue;
    for (std::uint32_t s = 0; s < (1u << N); ++s) {
      const FiberPoint pt = FiberPoint::root(N, s);
      c1.add(lp.log_eps - kLn2 - log_abs_p(T, n, lp.log_delta, pt), z, pt.value(T));
    }
    if (modified) {
      c2.add(std::log(std::abs(T[n - 1]) / 10.0) - std::log(std::abs(T[n])), z, 0.0);
      double min_gap = kInf;
      for (std::uint32_t s = 0; s < (1u << n); ++s)
        for (std::uint32_t t = s + 1; t < (1u << n); ++t)
          min_gap = std::min(min_gap, std::abs(branch_gap(s, n, t, n, T)));
      xxx.add(std::log(min_gap) - std::log(2.0 * std::abs(T[n])), z, 0.0);
    }
    exterior_boundary(T, lp, rays, [&](const FiberPoint& pt) {
      es4.add(log_abs_p(T, N, lv.log_delta, pt) / st.m + es4_floor, z, pt.value(T));
    });
    es4.add(outer_circle_bound(T, N, lv.log_delta, prev.rho) / st.m + es4_floor, z, prev.rho);
  }
  if (!modified) c2.add(std::log(prev.c / 10.0) - std::log(st.c), 0.0, 0.0);
  lev1.add(std::ldexp(lp.log_eps, -n) - std::ldexp(lv.log_eps, -N), 0.0, 0.0);

  std::vector<VerificationReport> out{p1.report(N, Predicate::P1), p2.report(N, Predicate::P2),
                                      c1.report(N, Predicate::C1), c2.report(N, Predicate::C2)};
  out.push_back(modified ? xxx.report(N, Predicate::XXX) : not_applicable(N, Predicate::XXX));
  out.push_back(es4.report(N, Predicate::ES4));
  out.push_back(es1.report(N, Predicate::ES1));
  out.push_back(es11.report(N, Predicate::ES11));
  out.push_back(lev1.report(N, Predicate::LEV1));
  return out;
}

}  // namespace wermer
