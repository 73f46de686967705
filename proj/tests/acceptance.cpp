// Acceptance run: one PASS/FAIL line per criterion.  Builds stage 4 at the
// default grid, so it takes several minutes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>
#include <string>

#include "wermer/analysis.hpp"
#include "wermer/grid.hpp"
#include "wermer/io.hpp"
#include "wermer/root_finding.hpp"

using namespace wermer;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0 || dt < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("[%s] %2d %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<cplx> disk_samples(int count, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> out;
  for (int i = 0; i < count; ++i) out.push_back(std::polar(radius * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng)));
  return out;
}

std::vector<cplx> dense_roots(const Stage& s, cplx z) { return roots_in_w(s.p, scalar_from<mp_cplx>(z), 0.0).as_cplx(); }

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

// Split a root set in two at the longest edge of its minimum spanning tree.
std::pair<std::vector<int>, std::vector<int>> split(const std::vector<cplx>& pts) {
  const int n = int(pts.size());
  std::vector<int> in_tree(n, 0), from(n, -1);
  std::vector<double> best(n, INFINITY);
  std::vector<std::pair<int, int>> edges;
  best[0] = 0;
  for (int it = 0; it < n; ++it) {
    int v = -1;
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && (v < 0 || best[i] < best[v])) v = i;
    in_tree[v] = 1;
    if (from[v] >= 0) edges.push_back({from[v], v});
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && std::abs(pts[i] - pts[v]) < best[i]) best[i] = std::abs(pts[i] - pts[v]), from[i] = v;
  }
  auto longest = std::max_element(edges.begin(), edges.end(), [&](auto a, auto b) {
    return std::abs(pts[a.first] - pts[a.second]) < std::abs(pts[b.first] - pts[b.second]);
  });
  edges.erase(longest);
  std::vector<int> side(n, -1);
  side[0] = 0;
  for (bool grew = true; grew;) {
    grew = false;
    for (auto [a, b] : edges)
      if ((side[a] == 0) != (side[b] == 0)) side[a] = side[b] = 0, grew = true;
  }
  std::pair<std::vector<int>, std::vector<int>> out;
  for (int i = 0; i < n; ++i) (side[i] == 0 ? out.first : out.second).push_back(i);
  return out;
}

// Nearest-root tracking done level by level: clusters are matched by their
// centres, then the offsets inside each cluster.  Plain nearest matching
// cannot follow pairs whose spacing is far below the per-step motion.
void match(const std::vector<cplx>& prev, const std::vector<cplx>& next, const std::vector<int>& pi,
           const std::vector<int>& ni, std::vector<int>& perm) {
  if (pi.size() == 1) {
    perm[pi[0]] = ni[0];
    return;
  }
  auto sub = [](const std::vector<cplx>& all, const std::vector<int>& idx) {
    std::vector<cplx> v;
    for (int i : idx) v.push_back(all[i]);
    return v;
  };
  auto centre = [](const std::vector<cplx>& v, const std::vector<int>& idx) {
    cplx c = 0;
    for (int i : idx) c += v[i];
    return c / double(idx.size());
  };
  const auto pv = sub(prev, pi), nv = sub(next, ni);
  auto [p1, p2] = split(pv);
  auto [n1, n2] = split(nv);
  if (p1.size() != p2.size() || n1.size() != n2.size()) throw std::runtime_error("root tree is not balanced");
  const cplx cp1 = centre(pv, p1), cp2 = centre(pv, p2), cn1 = centre(nv, n1), cn2 = centre(nv, n2);
  if (std::abs(cp1 - cn1) + std::abs(cp2 - cn2) > std::abs(cp1 - cn2) + std::abs(cp2 - cn1)) std::swap(n1, n2);
  const cplx a = centre(pv, p1), b = centre(nv, n1), c = centre(pv, p2), d = centre(nv, n2);
  std::vector<cplx> po = pv, no = nv;
  for (int i : p1) po[i] -= a;
  for (int i : n1) no[i] -= b;
  for (int i : p2) po[i] -= c;
  for (int i : n2) no[i] -= d;
  std::vector<int> lp(pv.size());
  match(po, no, p1, n1, lp);
  match(po, no, p2, n2, lp);
  for (std::size_t i = 0; i < pv.size(); ++i) perm[pi[i]] = ni[lp[i]];
}

// Tracks the root starting at `start` around the loop `loops` times and
// returns where it is after each completed loop.
std::vector<cplx> track(const Stage& s, cplx centre, double r, double phase, int steps, int loops, cplx start) {
  std::vector<cplx> ends;
  std::vector<cplx> prev = dense_roots(s, centre + std::polar(r, phase));
  std::size_t cur = std::min_element(prev.begin(), prev.end(),
                                     [&](cplx a, cplx b) { return std::abs(a - start) < std::abs(b - start); }) -
                    prev.begin();
  std::vector<int> all(prev.size());
  std::iota(all.begin(), all.end(), 0);
  for (int k = 1; k <= steps * loops; ++k) {
    const auto next = dense_roots(s, centre + std::polar(r, phase + 2 * std::numbers::pi * k / steps));
    std::vector<int> perm(prev.size());
    match(prev, next, all, all, perm);
    cur = perm[cur];
    prev = next;
    if (k % steps == 0) ends.push_back(prev[cur]);
  }
  return ends;
}

}  // namespace

int main(int argc, char** argv) {
  GridConfig cfg;  // defaults
  // --quick: coarse grid smoke run; budgets and verdicts then say nothing
  // about the default densities.
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  if (quick) cfg.z_grid = cfg.w_grid = 8;
  std::mt19937_64 rng(cfg.seed);
  Construction con;
  bool built = false;

  criterion(1, "stage-1 exactness", 1.0, [&] {
    const BranchPointTable table = enumerate_branch_points(6);
    const Stage s1 = init_stage1(table, cfg);
    double worst = 0;
    for (const cplx& z : disk_samples(100, 2.0, rng)) {
      const cplx r = std::sqrt(z - table[0]);
      worst = std::max(worst, multiset_distance(dense_roots(s1, z), {r, -r}));
    }
    return Outcome{worst <= 1e-10, fmt("max error %.3g (tol 1e-10)", worst)};
  });

  criterion(4, "predicate suite through stage 4 (default grid)", 600.0, [&] {
    con = build(Mode::Modified, cfg, 4);
    built = true;
    save(con, "acceptance_stage4.json");
    double worst = INFINITY;
    int applicable = 0;
    bool ok = con.built() == 4;
    for (const auto& r : con.reports) {
      if (!r.applicable || r.predicate == Predicate::LEV1) continue;
      ++applicable;
      worst = std::min(worst, r.worst_margin);
      ok = ok && r.pass && r.worst_margin > 0;
    }
    return Outcome{ok, std::to_string(applicable) + " applicable reports, smallest margin " + fmt("%.4g", worst)};
  });
  if (!built) {
    std::printf("stage-4 build failed; remaining criteria need it\n");
    return 1;
  }

  criterion(2, "root-shift law", 10.0, [&] {
    double worst = 0;
    for (int n = 1; n <= 3; ++n) {
      const auto fns = con.functions(n + 1);
      for (const cplx& z : disk_samples(20, n + 1.0, rng)) {
        const cplx shift = fns.terms(z)[n];
        std::vector<cplx> want;
        for (const cplx& w : dense_roots(con.stage(n), z)) want.push_back(w + shift), want.push_back(w - shift);
        worst = std::max(worst, multiset_distance(dense_roots(con.stage(n + 1), z), want));
      }
    }
    return Outcome{worst <= 1e-8, fmt("max multiset distance %.3g (tol 1e-8)", worst)};
  });

  criterion(3, "branch/root equivalence", 30.0, [&] {
    double worst = 0;
    for (int n = 1; n <= 4; ++n) {
      const auto fns = con.functions(n);
      for (const cplx& z : disk_samples(20, n + 1.0, rng))
        worst = std::max(worst, multiset_distance(dense_roots(con.stage(n), z), branch_values(fns.terms(z))));
    }
    return Outcome{worst <= 1e-8, fmt("max multiset distance %.3g (tol 1e-8)", worst)};
  });

  criterion(5, "separation ratio on circles", 60.0, [&] {
    double worst = INFINITY, k1 = 0;
    for (int i = 0; i < 25; ++i) {
      const int k = 1 + i % 3;
      const double ratio = separation_check(con, random_probe(con, k, rng));
      worst = std::min(worst, ratio);
      if (k == 1) k1 = std::max(k1, std::abs(ratio - 2.0));
    }
    return Outcome{worst > 1.5 && k1 <= 1e-12, fmt("min ratio %.6g", worst) + fmt(", |ratio - 2| at k=1 %.2g", k1)};
  });

  criterion(6, "shadow ratio at exact roots", 60.0, [&] {
    double worst = 0;
    int checks = 0;
    for (int N = 1; N <= 4; ++N)
      for (int k = 1; k <= N; ++k)
        for (const cplx& z : disk_samples(20, k + 1.0, rng)) {
          const auto T = con.functions(k).terms(z);
          if (std::abs(T[k - 1]) < 1e-12) continue;  // excluded point of g_k
          worst = std::max(worst, shadow_check(con, z, N, k));
          ++checks;
        }
    return Outcome{worst <= 1.0 / 9.0 + 1e-8, std::to_string(checks) + fmt(" checks, max ratio %.6g (bound 1/9)", worst)};
  });

  criterion(7, "jump at cut crossings", 60.0, [&] {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = INFINITY, eq1 = 0;
    int done = 0;
    for (int attempt = 0; done < 10 && attempt < 1000; ++attempt) {
      const int k = 1 + done % 3;
      const double r = 0.05 + 0.25 * u(rng);
      const cplx c = con.table[k - 1] + std::polar(0.5 * r * u(rng), 2 * std::numbers::pi * u(rng));
      const CircleProbe probe{c, r, k, 512};
      bool lone = true;
      for (int j = 0; j < k - 1; ++j) lone = lone && std::abs(con.table[j] - c) > r;
      const auto z1 = cut_crossing(con, probe);
      if (!lone || !z1) continue;
      try {
        validate_probe(con, probe);
      } catch (const Error&) {
        continue;
      }
      const auto [jump, ref] = jump_check(con, probe, *z1);
      worst = std::min(worst, jump - ref);
      if (k == 1) eq1 = std::max(eq1, std::abs(jump - ref));
      ++done;
    }
    return Outcome{done == 10 && worst >= -1e-8 && eq1 <= 1e-8,
                   std::to_string(done) + fmt(" probes, min(jump - ref) %.3g", worst) + fmt(", k=1 |jump - ref| %.2g", eq1)};
  });

  criterion(8, "potential dichotomy", 120.0, [&] {
    double at_roots = -INFINITY;
    for (const cplx& z : disk_samples(50, 3.0, rng))
      for (std::uint32_t s = 0; s < 16; ++s) at_roots = std::max(at_roots, potential(con, z, FiberPoint::root(4, s), 4).value);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double rho2 = con.stage(1).rho;
    const double tail = -(0.25 + 0.125);
    double lower = INFINITY, identity = INFINITY;
    int outside = 0;
    while (outside < 10000) {
      const cplx z = std::polar(2.0 * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
      const cplx w = std::polar(rho2 * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
      const auto T = con.functions(4).terms(z);
      if (log_abs_p(T, 2, con.stage(2).log_delta, FiberPoint::plain(w)) <= con.stage(2).log_eps()) continue;
      ++outside;
      const double u4 = potential(con, z, w, 4).value, u2 = potential(con, z, w, 2).value;
      lower = std::min(lower, u4);
      identity = std::min(identity, u4 - u2 - tail);
    }
    const bool ok = at_roots <= -3.0 + 1e-12 && std::isfinite(lower) && identity >= 0.0;
    return Outcome{ok, fmt("max u4 at roots %.6g", at_roots) + fmt(", u4 >= %.6g off the stage-2 set", lower) +
                           fmt(", min(u4 - u2 + 3/8) %.4g", identity)};
  });

  criterion(9, "monodromy by path tracking", 60.0, [&] {
    const Stage& s3 = con.stage(3);
    const auto fns = con.functions(3);
    std::vector<cplx> avoid;
    for (const auto& [r, m] : con.stage(2).Z->roots) avoid.push_back(r);
    bool ok = true;
    double worst = 0;
    int loops = 0;
    for (int j = 1; j <= 3; ++j) {
      double r = 0.3;
      for (const cplx& q : avoid)
        while (std::abs(std::abs(q - con.table[j - 1]) - r) < 0.05) r *= 0.8;
      const double phase = 0.1;  // start off every cut
      const cplx z0 = con.table[j - 1] + std::polar(r, phase);
      const auto T = fns.terms(z0);
      for (std::uint32_t s : {5u - j}) {
        const auto ends = track(s3, con.table[j - 1], r, phase, 720, 2, branch_from_terms(s, T));
        const cplx end1 = ends[0], end2 = ends[1];
        auto nearest = [&](cplx w) {
          std::uint32_t best = 0;
          for (std::uint32_t t = 1; t < 8; ++t)
            if (std::abs(branch_from_terms(t, T) - w) < std::abs(branch_from_terms(best, T) - w)) best = t;
          return best;
        };
        const std::uint32_t want = s ^ (1u << (j - 1));
        worst = std::max({worst, std::abs(end1 - branch_from_terms(want, T)), std::abs(end2 - branch_from_terms(s, T))});
        ok = ok && nearest(end1) == want && nearest(end2) == s;
        loops += 2;
      }
    }
    return Outcome{ok && worst <= 1e-6, std::to_string(loops) + fmt(" loops, max landing error %.3g", worst)};
  });

  criterion(10, "sublevel samples near stage roots", 120.0, [&] {
    bool ok = true;
    std::string detail;
    for (int N = 2; N <= 4; ++N) {
      double worst = 0;
      for (const cplx& z : disk_samples(10, N + 1.0, rng)) {
        const auto f = fiber(con, z, N);
        ok = ok && !f.sublevel_samples.empty();
        worst = std::max(worst, f.hausdorff_root_to_sublevel);
      }
      ok = ok && worst <= 1.0 / (N - 1);
      detail += "N=" + std::to_string(N) + fmt(": %.3g ", worst);
    }
    return Outcome{ok, detail + "(bound 1/(N-1))"};
  });

  criterion(11, "lev1 diagnostic", 0, [&] {
    const auto d = check_lev1(con);
    std::string detail;
    for (double v : d.log_values) detail += fmt("%.4g ", v);
    return Outcome{d.decreasing && d.log_values.size() == 4, "log eps_n^(1/2^n) = " + detail};
  });

  criterion(12, "deterministic build files", 0, [&] {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wermer_accept";
    fs::create_directories(dir);
    const std::string cli = WERMER_CLI;
    std::string extra;
    if (quick) {
      write_text(dir / "quick.json", "{\"z_grid\": 8, \"w_grid\": 8}\n");
      extra = " --config \"" + (dir / "quick.json").string() + "\"";
    }
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "\"" + cli + "\"" + extra + " --seed 7 --out \"" + (dir / run).string() + "\" build --stages 3 > \"" +
                              (dir / run).string() + ".log\" 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) return Outcome{false, "build exited with " + std::to_string(rc)};
    }
    const std::string a = read_text(dir / "a" / "construction.json"), b = read_text(dir / "b" / "construction.json");
    return Outcome{a == b && !a.empty(), std::to_string(a.size()) + (a == b ? " bytes, identical" : " bytes, DIFFERENT")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
