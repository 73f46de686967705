#include "wermer/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wermer/errors.hpp"

namespace wermer {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaMismatch, what); }
[[noreturn]] void invariant(const std::string& name, const std::string& what) {
  throw Error(ErrorKind::InvariantViolation, name + ": " + what);
}

json cplx_json(cplx z) { return json::array({format_real(z.real()), format_real(z.imag())}); }

cplx cplx_from(const json& j) {
  if (!j.is_array() || j.size() != 2) schema("expected [re, im]");
  return {parse_real(j[0].get<std::string>()), parse_real(j[1].get<std::string>())};
}

mp_real mp_from(const std::string& s) {
  try {
    return mp_real(s);
  } catch (const std::exception&) {
    schema("bad decimal '" + s + "'");
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    schema(std::string("field '") + key + "': " + e.what());
  }
}

json config_json(const GridConfig& c) {
  json j;
  j["z_grid"] = format_real(c.z_grid);
  j["w_grid"] = format_real(c.w_grid);
  j["margin"] = format_real(c.margin);
  j["max_stage"] = c.max_stage;
  j["seed"] = c.seed;
  j["rays"] = c.rays;
  j["p1_samples"] = c.p1_samples;
  j["verify_factor"] = format_real(c.verify_factor);
  return j;
}

GridConfig config_from(const json& j) {
  GridConfig c;
  c.z_grid = parse_real(field<std::string>(j, "z_grid"));
  c.w_grid = parse_real(field<std::string>(j, "w_grid"));
  c.margin = parse_real(field<std::string>(j, "margin"));
  c.max_stage = field<int>(j, "max_stage");
  c.seed = field<std::uint64_t>(j, "seed");
  c.rays = field<int>(j, "rays");
  c.p1_samples = field<int>(j, "p1_samples");
  c.verify_factor = parse_real(field<std::string>(j, "verify_factor"));
  return c;
}

json stage_json(const Stage& s) {
  json j;
  j["n"] = s.n;
  j["c"] = format_real(s.c);
  j["eps_exp"] = s.eps_exp;
  j["eps"] = format_dyadic(s.eps_exp);
  j["m"] = s.m;
  j["log_delta"] = format_real(s.log_delta);
  j["delta"] = format_real(s.delta());
  j["rho"] = format_real(s.rho);
  json p;
  p["deg_z"] = s.p.deg_z();
  p["deg_w"] = s.p.deg_w();
  json rows = json::array();
  for (int i = 0; i <= s.p.deg_z(); ++i) {
    json row = json::array();
    for (int k = 0; k <= s.p.deg_w(); ++k) {
      const mp_cplx& v = s.p(i, k);
      row.push_back(json::array({format_mp(v.real()), format_mp(v.imag())}));
    }
    rows.push_back(std::move(row));
  }
  p["coeffs"] = std::move(rows);
  j["p"] = std::move(p);
  if (s.Z) {
    json roots = json::array();
    for (const auto& [r, m] : s.Z->roots) roots.push_back({{"z", cplx_json(r)}, {"order", m}});
    j["Z"] = {{"roots", roots}};
  } else {
    j["Z"] = nullptr;
  }
  return j;
}

Stage stage_from(const json& j) {
  Stage s;
  s.n = field<int>(j, "n");
  s.c = parse_real(field<std::string>(j, "c"));
  s.eps_exp = field<std::int64_t>(j, "eps_exp");
  s.m = field<int>(j, "m");
  s.log_delta = parse_real(field<std::string>(j, "log_delta"));
  s.rho = parse_real(field<std::string>(j, "rho"));
  const json& p = j.at("p");
  const int dz = field<int>(p, "deg_z"), dw = field<int>(p, "deg_w");
  const json& rows = p.at("coeffs");
  if (dz < 0 || dw < 0 || !rows.is_array() || int(rows.size()) != dz + 1) schema("p: bad dimensions");
  typename BiPoly<mp_cplx>::Matrix t(dz + 1, dw + 1);
  for (int i = 0; i <= dz; ++i) {
    if (!rows[i].is_array() || int(rows[i].size()) != dw + 1) schema("p: bad row");
    for (int k = 0; k <= dw; ++k) {
      const json& e = rows[i][k];
      if (!e.is_array() || e.size() != 2) schema("p: bad coefficient");
      t(i, k) = mp_cplx(mp_from(e[0].get<std::string>()), mp_from(e[1].get<std::string>()));
    }
  }
  s.p = BiPoly<mp_cplx>(std::move(t));
  if (!j.contains("Z")) schema("missing field 'Z'");
  if (!j["Z"].is_null()) {
    ZPoly Z;
    for (const auto& r : j["Z"].at("roots")) Z.roots.push_back({cplx_from(r.at("z")), field<int>(r, "order")});
    s.Z = std::move(Z);
  }
  return s;
}

json report_json(const VerificationReport& r) {
  json j;
  j["stage"] = r.stage;
  j["predicate"] = to_string(r.predicate);
  j["worst_margin"] = format_real(r.worst_margin);
  j["worst_z"] = cplx_json(r.worst_z);
  j["worst_w"] = cplx_json(r.worst_w);
  j["samples"] = r.samples;
  j["applicable"] = r.applicable;
  j["pass"] = r.pass;
  return j;
}

VerificationReport report_from(const json& j) {
  VerificationReport r;
  r.stage = field<int>(j, "stage");
  try {
    r.predicate = parse_predicate(field<std::string>(j, "predicate"));
  } catch (const Error& e) {
    schema(e.what());
  }
  r.worst_margin = parse_real(field<std::string>(j, "worst_margin"));
  r.worst_z = cplx_from(j.at("worst_z"));
  r.worst_w = cplx_from(j.at("worst_w"));
  r.samples = field<std::size_t>(j, "samples");
  r.applicable = field<bool>(j, "applicable");
  r.pass = field<bool>(j, "pass");
  return r;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) schema("bad real '" + s + "'");
  return v;
}

std::string format_mp(const mp_real& x) {
  // signed zeros do not survive the decimal parser
  if (x == 0) return mp_real(0).str(std::numeric_limits<mp_real>::max_digits10, std::ios_base::scientific);
  return x.str(std::numeric_limits<mp_real>::max_digits10, std::ios_base::scientific);
}

std::string format_dyadic(std::int64_t exp) {
  const mp_real v = boost::multiprecision::ldexp(mp_real(1), -int(exp));
  return v.str(17, std::ios_base::scientific);
}

std::string save_string(const Construction& con) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["mode"] = to_string(con.mode);
  j["seed"] = con.config.seed;
  j["config"] = config_json(con.config);
  json pts = json::array();
  for (const auto& a : con.table.points) pts.push_back(json::array({to_string(a.re), to_string(a.im)}));
  j["branch_points"] = std::move(pts);
  json stages = json::array();
  for (const auto& s : con.stages) stages.push_back(stage_json(s));
  j["stages"] = std::move(stages);
  json reports = json::array();
  for (const auto& r : con.reports) reports.push_back(report_json(r));
  j["reports"] = std::move(reports);
  return j.dump(1) + "\n";
}

void check_invariants(const Construction& con) {
  if (con.stages.empty()) invariant("STAGE_INDEX", "no stages");
  if (con.table.size() < con.stages.size() + 1) invariant("STAGE_INDEX", "branch point table too short");
  for (int n = 1; n <= con.built(); ++n) {
    const Stage& s = con.stage(n);
    if (s.n != n) invariant("STAGE_INDEX", "stage record " + std::to_string(n) + " carries n = " + std::to_string(s.n));
    if (s.p.deg_w() != (1 << n))
      invariant("DEGREE", "stage " + std::to_string(n) + " has deg_w " + std::to_string(s.p.deg_w()));
    if (!(s.c > 0.0)) invariant("C_LADDER", "c_" + std::to_string(n) + " is not positive");
    if (s.m < 1) invariant("DEGREE", "m_" + std::to_string(n) + " < 1");
    if (n >= 2 && !s.Z && n < con.built()) invariant("DEGREE", "Z_" + std::to_string(n) + " missing");
    if (n == 1) continue;
    const Stage& prev = con.stage(n - 1);
    if (s.eps_exp <= prev.eps_exp)
      invariant("EPS_MONOTONE", "eps_" + std::to_string(n) + " is not below eps_" + std::to_string(n - 1));
    if (!(s.rho > prev.rho + 1.0)) invariant("RHO_GAP", "rho gap at stage " + std::to_string(n) + " is not > 1");
    if (con.mode == Mode::Wermer && s.c > prev.c / 10.0 * (1 + 1e-12))
      invariant("C_LADDER", "c_" + std::to_string(n) + " > c_" + std::to_string(n - 1) + "/10");
  }
}

namespace {

Construction parse_construction(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) schema("top level is not an object");
  const int version = field<int>(j, "schema_version");
  if (version != kSchemaVersion)
    schema("schema_version " + std::to_string(version) + ", expected " + std::to_string(kSchemaVersion));
  Construction con;
  try {
    con.mode = parse_mode(field<std::string>(j, "mode"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaMismatch) throw;
    schema(e.what());
  }
  con.config = config_from(j.at("config"));
  if (field<std::uint64_t>(j, "seed") != con.config.seed) schema("seed disagrees with config");
  for (const auto& p : j.at("branch_points")) {
    if (!p.is_array() || p.size() != 2) schema("branch point is not a pair");
    con.table.points.push_back({parse_rational(p[0].get<std::string>()), parse_rational(p[1].get<std::string>())});
  }
  for (const auto& s : j.at("stages")) con.stages.push_back(stage_from(s));
  for (const auto& r : j.at("reports")) con.reports.push_back(report_from(r));
  check_invariants(con);
  return con;
}

}  // namespace

Construction load_string(const std::string& text) {
  try {
    return parse_construction(text);
  } catch (const json::exception& e) {
    schema(e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Usage, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save(const Construction& con, const std::filesystem::path& path) { write_text(path, save_string(con)); }
Construction load(const std::filesystem::path& path) { return load_string(read_text(path)); }

std::string to_string(ExportKind k) {
  switch (k) {
    case ExportKind::FiberSlice: return "fiber_slice";
    case ExportKind::PotentialSlice: return "potential_slice";
    case ExportKind::MarginMap: return "margin_map";
  }
  return "?";
}

std::string to_csv(const GridExport& g) {
  if (int(g.values.size()) != g.nx * g.ny) throw Error(ErrorKind::InvariantViolation, "export: value count mismatch");
  std::ostringstream out;
  out << "# kind=" << to_string(g.kind) << "\n";
  out << "# x=" << g.x_axis << " range=[" << format_real(g.x0) << "," << format_real(g.x1) << "] n=" << g.nx << "\n";
  out << "# y=" << g.y_axis << " range=[" << format_real(g.y0) << "," << format_real(g.y1) << "] n=" << g.ny << "\n";
  out << "# value=" << g.value_name << " units=" << (g.units.empty() ? "1" : g.units)
      << " clamp_sentinel=" << format_real(g.clamp_sentinel) << "\n";
  for (const auto& note : g.notes) out << "# " << note << "\n";
  out << "x,y," << g.value_name << "\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << format_real(g.x(i)) << "," << format_real(g.y(j)) << "," << format_real(g.values[j * g.nx + i]) << "\n";
  return out.str();
}

void write_csv(const GridExport& g, const std::filesystem::path& path) { write_text(path, to_csv(g)); }

std::string to_pgm(const GridExport& g, double lo, double hi) {
  if (int(g.values.size()) != g.nx * g.ny) throw Error(ErrorKind::InvariantViolation, "export: value count mismatch");
  std::ostringstream out;
  out << "P5\n# kind=" << to_string(g.kind) << " x=" << g.x_axis << "[" << format_real(g.x0) << ","
      << format_real(g.x1) << "] y=" << g.y_axis << "[" << format_real(g.y0) << "," << format_real(g.y1)
      << "] top row is y max\n"
      << g.nx << " " << g.ny << "\n255\n";
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      double v = g.values[j * g.nx + i];
      if (std::isnan(v)) v = lo;
      const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
      out.put(char(static_cast<unsigned char>(std::lround(255.0 * t))));
    }
  return out.str();
}

void write_pgm(const GridExport& g, double lo, double hi, const std::filesystem::path& path) {
  write_text(path, to_pgm(g, lo, hi));
}

}  // namespace wermer
