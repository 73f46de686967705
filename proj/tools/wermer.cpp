// Command-line front end: build / verify / inspect constructions.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wermer/analysis.hpp"
#include "wermer/errors.hpp"
#include "wermer/grid.hpp"
#include "wermer/io.hpp"

using namespace wermer;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kError = 1, kPredicateFail = 2;

struct Globals {
  std::string config_path, mode = "modified", out = ".", file;
  std::optional<std::uint64_t> seed;
};

std::vector<double> numbers(const std::string& s, std::size_t count, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Usage, std::string(what) + ": cannot parse '" + s + "'");
    }
  }
  if (v.size() != count)
    throw Error(ErrorKind::Usage, std::string(what) + ": expected " + std::to_string(count) + " comma-separated numbers");
  return v;
}

cplx point(const std::string& s, const char* what) {
  const auto v = numbers(s, 2, what);
  return {v[0], v[1]};
}

GridConfig load_config(const Globals& g) {
  GridConfig cfg;
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv("WERMER_CONFIG")) path = env;
  if (!path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaMismatch, "config " + path + ": " + e.what());
    }
    try {
      cfg.z_grid = j.value("z_grid", cfg.z_grid);
      cfg.w_grid = j.value("w_grid", cfg.w_grid);
      cfg.margin = j.value("margin", cfg.margin);
      cfg.max_stage = j.value("max_stage", cfg.max_stage);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.rays = j.value("rays", cfg.rays);
      cfg.p1_samples = j.value("p1_samples", cfg.p1_samples);
      cfg.verify_factor = j.value("verify_factor", cfg.verify_factor);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaMismatch, "config " + path + ": " + e.what());
    }
  }
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

fs::path construction_path(const Globals& g) {
  return g.file.empty() ? fs::path(g.out) / "construction.json" : fs::path(g.file);
}

Construction load_construction(const Globals& g) {
  Construction con = load(construction_path(g));
  if (g.seed) con.config.seed = *g.seed;
  return con;
}

int stage_or_last(const Construction& con, int n) {
  if (n == 0) return con.built();
  if (n < 1 || n > con.built())
    throw Error(ErrorKind::Usage, "stage " + std::to_string(n) + " not in file (built " + std::to_string(con.built()) + ")");
  return n;
}

std::string fmt_c(cplx z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  return buf;
}

void print_stages(const Construction& con) {
  std::printf("%-3s %-14s %-10s %-8s %-12s %-10s %s\n", "n", "c", "eps", "m", "log_delta", "rho", "deg_z");
  for (const auto& s : con.stages)
    std::printf("%-3d %-14.6e 2^-%-7lld %-8d %-12.5f %-10.5f %d\n", s.n, s.c, (long long)s.eps_exp, s.m, s.log_delta,
                s.rho, s.p.deg_z());
}

bool print_reports(const std::vector<VerificationReport>& reports) {
  bool ok = true;
  std::printf("%-6s %-5s %-14s %-9s %s\n", "stage", "pred", "worst_margin", "samples", "verdict");
  for (const auto& r : reports) {
    std::printf("%-6d %-5s %-14.6g %-9zu %s\n", r.stage, to_string(r.predicate).c_str(), r.worst_margin, r.samples,
                !r.applicable ? "n/a" : r.pass ? "pass" : "FAIL");
    ok = ok && r.pass;
  }
  for (const auto& r : reports)
    if (!r.pass)
      std::printf("  %s at stage %d fails worst at z = %s, w = %s\n", to_string(r.predicate).c_str(), r.stage,
                  fmt_c(r.worst_z).c_str(), fmt_c(r.worst_w).c_str());
  return ok;
}

int cmd_build(const Globals& g, int stages) {
  const GridConfig cfg = load_config(g);
  const Construction con = build(parse_mode(g.mode), cfg, stages);
  const fs::path path = construction_path(g);
  save(con, path);
  print_stages(con);
  const bool ok = print_reports(con.reports);
  std::printf("wrote %s\n", path.string().c_str());
  return ok ? kOk : kPredicateFail;
}

int cmd_verify(const Globals& g, int stage, bool all) {
  const Construction con = load_construction(g);
  std::vector<VerificationReport> reports;
  const int last = stage_or_last(con, stage);
  for (int n = all ? 1 : last; n <= last; ++n) {
    auto r = verify_stage(con, n);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  return print_reports(reports) ? kOk : kPredicateFail;
}

int cmd_fiber(const Globals& g, const std::string& z_text, int stage) {
  const Construction con = load_construction(g);
  const int N = stage_or_last(con, stage);
  const cplx z0 = point(z_text, "--z");
  const FiberReport f = fiber(con, z0, N);
  std::printf("fiber of p_%d at z = %s: %zu roots\n", N, fmt_c(z0).c_str(), f.roots.size());
  for (const cplx& w : f.roots.roots) std::printf("  %s\n", fmt_c(w).c_str());
  std::printf("min pair gap %.6g, sublevel samples %zu, hausdorff %.6g\n", f.min_pair_gap, f.sublevel_samples.size(),
              f.hausdorff_root_to_sublevel);
  std::ostringstream csv;
  csv << "# fiber z=" << format_real(z0.real()) << "," << format_real(z0.imag()) << " stage=" << N << "\n";
  csv << "kind,re_w,im_w\n";
  for (const cplx& w : f.roots.roots) csv << "root," << format_real(w.real()) << "," << format_real(w.imag()) << "\n";
  for (const auto& s : f.sublevel_samples)
    csv << "sublevel," << format_real(s.w.real()) << "," << format_real(s.w.imag()) << "\n";
  const fs::path path = fs::path(g.out) / "fiber.csv";
  write_text(path, csv.str());
  std::printf("wrote %s\n", path.string().c_str());
  return kOk;
}

GridExport window(const std::string& text, const std::string& res, ExportKind kind) {
  const auto w = numbers(text, 4, "window");
  const auto r = numbers(res, 2, "--res");
  GridExport gx;
  gx.kind = kind;
  gx.x0 = w[0], gx.x1 = w[1], gx.y0 = w[2], gx.y1 = w[3];
  gx.nx = int(r[0]), gx.ny = int(r[1]);
  if (gx.nx < 1 || gx.ny < 1 || gx.nx * gx.ny > 4'000'000) throw Error(ErrorKind::Usage, "--res out of range");
  gx.values.resize(std::size_t(gx.nx) * gx.ny);
  return gx;
}

int cmd_potential(const Globals& g, const std::string& grid, const std::string& res, const std::string& w_text,
                  int stage) {
  const Construction con = load_construction(g);
  const int N = stage_or_last(con, stage);
  const cplx w = point(w_text, "--w-slice");
  GridExport gx = window(grid, res, ExportKind::PotentialSlice);
  gx.x_axis = "Re z", gx.y_axis = "Im z", gx.value_name = "u_N";
  gx.notes.push_back("stage=" + std::to_string(N) + " w=" + format_real(w.real()) + "," + format_real(w.imag()));
  double lo = INFINITY, hi = -INFINITY;
  for (int j = 0; j < gx.ny; ++j)
    for (int i = 0; i < gx.nx; ++i) {
      const double v = potential(con, {gx.x(i), gx.y(j)}, w, N).value;
      gx.values[j * gx.nx + i] = v;
      lo = std::min(lo, v), hi = std::max(hi, v);
    }
  const fs::path path = fs::path(g.out) / "potential_slice.csv";
  write_csv(gx, path);
  std::printf("u_%d over %d x %d points: min %.6g max %.6g\nwrote %s\n", N, gx.nx, gx.ny, lo, hi, path.string().c_str());
  return kOk;
}

// With no --window the raster is centred on root h_s and sized from the
// sublevel boundary around it; pixels are then offsets from h_s so that
// components far below double spacing at |w| ~ 1 still resolve.
int cmd_slice(const Globals& g, const std::string& z_text, const std::string& win, const std::string& res, int stage,
              std::uint32_t root, double zoom) {
  const Construction con = load_construction(g);
  const int N = stage_or_last(con, stage);
  const cplx z0 = point(z_text, "--z");
  const auto T = con.functions(N).terms(z0);
  const int from = std::min(membership_index(z0), N);
  if (root >= (1u << N)) throw Error(ErrorKind::Usage, "--root out of range");

  const bool relative = win.empty();
  GridExport gx;
  if (relative) {
    const Stage& st = con.stage(N);
    double log_r = -std::numeric_limits<double>::infinity();
    for (const auto& pt : sublevel_samples(T, N, st.log_delta, st.log_eps(), 16, false).boundary)
      if (pt.anchor == root) log_r = std::max(log_r, pt.log_r);
    if (!std::isfinite(log_r)) throw Error(ErrorKind::Usage, "no sublevel boundary found around the root");
    const double h = zoom * std::exp(log_r);
    gx = window(format_real(-h) + "," + format_real(h) + "," + format_real(-h) + "," + format_real(h), res,
                ExportKind::FiberSlice);
    const cplx w0 = branch_from_terms(root, T);
    gx.x_axis = "Re(w-h_s)", gx.y_axis = "Im(w-h_s)";
    gx.notes.push_back("root mask=" + std::to_string(root) + " h_s=" + format_real(w0.real()) + "," +
                       format_real(w0.imag()));
  } else {
    gx = window(win, res, ExportKind::FiberSlice);
    gx.x_axis = "Re w", gx.y_axis = "Im w";
  }
  gx.value_name = "member";
  gx.notes.push_back("stage=" + std::to_string(N) + " z=" + format_real(z0.real()) + "," + format_real(z0.imag()) +
                     " membership from stage " + std::to_string(from));
  std::size_t inside = 0;
  for (int j = 0; j < gx.ny; ++j)
    for (int i = 0; i < gx.nx; ++i) {
      const cplx d(gx.x(i), gx.y(j));
      const FiberPoint pt = relative ? FiberPoint::root(N, root).offset_by(std::log(std::abs(d)), std::arg(d))
                                     : FiberPoint::plain(d);
      bool in = true;
      for (int n = from; n <= N && in; ++n) in = log_abs_p(T, n, con.stage(n).log_delta, pt) <= con.stage(n).log_eps();
      gx.values[j * gx.nx + i] = in ? 1.0 : 0.0;
      inside += in;
    }
  const fs::path path = fs::path(g.out) / "fiber_raster.pgm";
  write_pgm(gx, 0.0, 1.0, path);
  write_csv(gx, fs::path(g.out) / "fiber_raster.csv");
  std::printf("%zu of %d pixels in the sublevel set (window half-width %.6g)\nwrote %s\n", inside, gx.nx * gx.ny,
              gx.x1, path.string().c_str());
  return kOk;
}

int cmd_probe(const Globals& g, const std::string& circle, int k, int samples) {
  const Construction con = load_construction(g);
  const auto c = numbers(circle, 3, "--circle");
  const CircleProbe probe{{c[0], c[1]}, c[2], k, samples};
  validate_probe(con, probe);
  bool ok = true;
  const double sep = separation_check(con, probe);
  std::printf("separation ratio %.12g (threshold 1.5)%s\n", sep, sep > 1.5 ? "" : "  FAIL");
  ok = ok && sep > 1.5;
  const int N = con.built();
  double shadow = 0.0;
  for (const cplx& z : circle_points(probe.center, probe.radius, 32)) shadow = std::max(shadow, shadow_check(con, z, N, k));
  std::printf("shadow ratio at stage %d roots %.6g (threshold 1/9)%s\n", N, shadow,
              shadow <= 1.0 / 9.0 + 1e-8 ? "" : "  FAIL");
  ok = ok && shadow <= 1.0 / 9.0 + 1e-8;
  if (const auto z1 = cut_crossing(con, probe)) {
    const auto [jump, ref] = jump_check(con, probe, *z1);
    std::printf("cut %d crosses at %s: jump %.12g, reference %.12g%s\n", k, fmt_c(*z1).c_str(), jump, ref,
                jump >= ref - 1e-8 ? "" : "  FAIL");
    ok = ok && jump >= ref - 1e-8;
  } else {
    std::printf("cut %d does not cross the circle\n", k);
  }
  return ok ? kOk : kPredicateFail;
}

int cmd_monodromy(const Globals& g, const std::string& loop, int stage) {
  const Construction con = load_construction(g);
  const int N = stage_or_last(con, stage);
  const auto c = numbers(loop, 3, "--loop");
  const StageFunctionSet fns = con.functions(N);
  bool ok = true;
  std::printf("%-8s %-8s %-8s\n", "start", "end", "expected");
  for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
    const SignVector s{N, mask};
    const SignVector end = monodromy({c[0], c[1]}, c[2], s, fns, con.table);
    const SignVector want = predicted_monodromy({c[0], c[1]}, c[2], s, fns);
    auto bits = [N](std::uint32_t m) {
      std::string out;
      for (int j = 0; j < N; ++j) out += (m >> j) & 1u ? '-' : '+';
      return out;
    };
    std::printf("%-8s %-8s %-8s%s\n", bits(mask).c_str(), bits(end.mask).c_str(), bits(want.mask).c_str(),
                end.mask == want.mask ? "" : "  FAIL");
    ok = ok && end.mask == want.mask;
  }
  return ok ? kOk : kPredicateFail;
}

int cmd_lev1(const Globals& g) {
  const Construction con = load_construction(g);
  const auto d = check_lev1(con);
  for (std::size_t i = 0; i < d.log_values.size(); ++i)
    std::printf("n=%zu  log(eps_n^(1/2^n)) = %.9g\n", i + 1, d.log_values[i]);
  std::printf("verdict: %s\n", d.decreasing ? "decreasing" : "not decreasing");
  return d.decreasing ? kOk : kPredicateFail;
}

int cmd_export(const Globals& g, bool margin_map, int stage, const std::string& res) {
  const Construction con = load_construction(g);
  const fs::path out(g.out);
  std::ostringstream st;
  st << "n,c,eps_exp,eps,m,log_delta,rho,deg_z,deg_w,Z_degree\n";
  for (const auto& s : con.stages)
    st << s.n << "," << format_real(s.c) << "," << s.eps_exp << "," << format_dyadic(s.eps_exp) << "," << s.m << ","
       << format_real(s.log_delta) << "," << format_real(s.rho) << "," << s.p.deg_z() << "," << s.p.deg_w() << ","
       << (s.Z ? std::to_string(s.Z->degree()) : "") << "\n";
  write_text(out / "stages.csv", st.str());
  std::ostringstream rp;
  rp << "stage,predicate,worst_margin,worst_z_re,worst_z_im,worst_w_re,worst_w_im,samples,applicable,pass\n";
  for (const auto& r : con.reports)
    rp << r.stage << "," << to_string(r.predicate) << "," << format_real(r.worst_margin) << ","
       << format_real(r.worst_z.real()) << "," << format_real(r.worst_z.imag()) << "," << format_real(r.worst_w.real())
       << "," << format_real(r.worst_w.imag()) << "," << r.samples << "," << r.applicable << "," << r.pass << "\n";
  write_text(out / "reports.csv", rp.str());
  std::printf("wrote %s and %s\n", (out / "stages.csv").string().c_str(), (out / "reports.csv").string().c_str());
  if (!margin_map) return kOk;

  // Separation margin log(min gap of g_n) − log(2|T_{n+1}|) over D_{n+1}.
  const int n = stage_or_last(con, stage == 0 ? con.built() - 1 : stage);
  if (n >= con.built()) throw Error(ErrorKind::Usage, "margin map needs stage n+1 built");
  const double R = n + 1.0;
  GridExport gx = window(format_real(-R) + "," + format_real(R) + "," + format_real(-R) + "," + format_real(R), res,
                         ExportKind::MarginMap);
  gx.x_axis = "Re z", gx.y_axis = "Im z", gx.value_name = "xxx_margin", gx.units = "nats";
  gx.notes.push_back("stage=" + std::to_string(n) + " outside |z|<" + format_real(R) + " stores nan");
  const StageFunctionSet fns = con.functions(n + 1);
  double lo = INFINITY, hi = -INFINITY;
  for (int j = 0; j < gx.ny; ++j)
    for (int i = 0; i < gx.nx; ++i) {
      const cplx z(gx.x(i), gx.y(j));
      double v = NAN;
      if (std::abs(z) < R) {
        const auto T = fns.terms(z);
        double gap = INFINITY;
        for (std::uint32_t s = 0; s < (1u << n); ++s)
          for (std::uint32_t t = s + 1; t < (1u << n); ++t) gap = std::min(gap, std::abs(branch_gap(s, n, t, n, T)));
        v = std::log(gap) - std::log(2.0 * std::abs(T[n]));
        if (!std::isfinite(v)) v = gx.clamp_sentinel;
        else lo = std::min(lo, v), hi = std::max(hi, v);
      }
      gx.values[j * gx.nx + i] = v;
    }
  write_csv(gx, out / "margin_map.csv");
  write_pgm(gx, std::max(lo, -5.0), std::min(hi, 40.0), out / "margin_map.pgm");
  std::printf("separation margin at stage %d: min %.6g nats\nwrote %s\n", n, lo, (out / "margin_map.csv").string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wermer: build and interrogate the stage-by-stage polynomial construction of X"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "grid config JSON (else $WERMER_CONFIG)");
  app.add_option("--seed", g.seed, "seed override");
  app.add_option("--mode", g.mode, "wermer | modified")->check(CLI::IsMember({"wermer", "modified"}));
  app.add_option("--out", g.out, "output directory");
  app.add_option("--file", g.file, "construction file (default <out>/construction.json)");

  int stages = 3, stage = 0, k = 1, samples = 512;
  bool all = false, raster = false, lev1 = false, margin_map = false;
  std::string z_text, grid = "-2,2,-2,2", res = "101,101", w_slice, circle, loop, win;
  std::uint32_t root = 0;
  double zoom = 1.5;

  auto* b = app.add_subcommand("build", "build stages 1..N and write the construction file");
  b->add_option("--stages", stages, "number of stages")->check(CLI::Range(1, 6));
  auto* v = app.add_subcommand("verify", "re-run the predicate checks on a construction file");
  v->add_option("--stage", stage, "stage (default: last)");
  v->add_flag("--all", all, "every stage");
  auto* f = app.add_subcommand("fiber", "roots and sublevel samples over one z");
  f->add_option("--z", z_text, "re,im")->required();
  f->add_option("--stage", stage);
  auto* p = app.add_subcommand("potential", "u_N over a z window at fixed w");
  p->add_option("--grid", grid, "x0,x1,y0,y1");
  p->add_option("--res", res, "nx,ny");
  p->add_option("--w-slice", w_slice, "re,im")->required();
  p->add_option("--stage", stage);
  auto* s = app.add_subcommand("slice", "graymap of sublevel membership over a w window");
  s->add_flag("--fiber-raster", raster)->required();
  s->add_option("--z", z_text, "re,im")->required();
  s->add_option("--window", win, "x0,x1,y0,y1 in w (default: around one root)");
  s->add_option("--root", root, "sign mask of the root to centre on");
  s->add_option("--zoom", zoom, "half-width in units of the boundary radius");
  s->add_option("--res", res, "nx,ny");
  s->add_option("--stage", stage);
  auto* pr = app.add_subcommand("probe", "separation, shadow and jump checks on a circle");
  pr->add_option("--circle", circle, "re,im,r")->required();
  pr->add_option("--k", k)->required();
  pr->add_option("--samples", samples);
  auto* m = app.add_subcommand("monodromy", "continue every branch around a loop");
  m->add_option("--loop", loop, "re,im,r")->required();
  m->add_option("--stage", stage);
  auto* d = app.add_subcommand("diag", "diagnostics");
  d->add_flag("--lev1", lev1)->required();
  auto* e = app.add_subcommand("export", "CSV tables of stages and reports");
  e->add_flag("--margin-map", margin_map, "also write the separation margin map");
  e->add_option("--stage", stage);
  e->add_option("--res", res, "nx,ny");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    std::cerr << app.help();
    return kError;
  }

  try {
    if (*b) return cmd_build(g, stages);
    if (*v) return cmd_verify(g, stage, all);
    if (*f) return cmd_fiber(g, z_text, stage);
    if (*p) return cmd_potential(g, grid, res, w_slice, stage);
    if (*s) return cmd_slice(g, z_text, win, res, stage, root, zoom);
    if (*pr) return cmd_probe(g, circle, k, samples);
    if (*m) return cmd_monodromy(g, loop, stage);
    if (*d) return cmd_lev1(g);
    if (*e) return cmd_export(g, margin_map, stage, res);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    if (err.kind() == ErrorKind::Usage) std::cerr << app.help();
    return kError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kError;
  }
  return kError;
}
