#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <nlohmann/json.hpp>

#include "wermer/errors.hpp"
#include "wermer/io.hpp"

using namespace wermer;

namespace {

const Construction& con2() {
  static const Construction con = [] {
    GridConfig cfg;
    cfg.z_grid = 8;
    cfg.w_grid = 8;
    return build(Mode::Modified, cfg, 2);
  }();
  return con;
}

std::string tamper(const std::string& text, const std::function<void(nlohmann::ordered_json&)>& f) {
  auto j = nlohmann::ordered_json::parse(text);
  f(j);
  return j.dump(1) + "\n";
}

void expect_invariant(const std::string& text, const std::string& name) {
  try {
    load_string(text);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvariantViolation);
    CHECK(std::string(e.what()).find(name) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("real formatting round trips") {
  for (double x : {0.0, -1.5, 1.0 / 3.0, 1e-300, 4.9e-324, 1.7976931348623157e308}) CHECK(parse_real(format_real(x)) == x);
  CHECK(std::isinf(parse_real(format_real(-INFINITY))));
  CHECK(std::isnan(parse_real("nan")));
  CHECK_THROWS_AS(parse_real("1.0x"), Error);
  CHECK(format_dyadic(1) == "5.00000000000000000e-01");
  CHECK(format_dyadic(4000).find("e-1205") != std::string::npos);
}

TEST_CASE("save load save is byte identical") {
  const std::string a = save_string(con2());
  const Construction back = load_string(a);
  CHECK(save_string(back) == a);
  CHECK(back.built() == 2);
  CHECK(back.stage(2).eps_exp == con2().stage(2).eps_exp);
  CHECK(back.table.points == con2().table.points);
  CHECK(back.reports.size() == con2().reports.size());
  // coefficients survive at full precision
  CHECK(back.stage(2).p(0, 0) == con2().stage(2).p(0, 0));
}

TEST_CASE("reloaded file re-verifies to the stored verdicts") {
  const Construction back = load_string(save_string(con2()));
  for (const auto& r : verify_stage(back, 2)) {
    bool found = false;
    for (const auto& q : back.reports)
      if (q.stage == 2 && q.predicate == r.predicate) {
        found = true;
        CHECK(q.pass == r.pass);
        CHECK(q.worst_margin == doctest::Approx(r.worst_margin));
      }
    CHECK(found);
  }
}

TEST_CASE("load rejects tampered files") {
  const std::string a = save_string(con2());
  expect_invariant(tamper(a, [](auto& j) { j["stages"][1]["eps_exp"] = j["stages"][0]["eps_exp"]; }), "EPS_MONOTONE");
  expect_invariant(tamper(a, [](auto& j) { j["stages"][1]["rho"] = j["stages"][0]["rho"]; }), "RHO_GAP");
  expect_invariant(tamper(a, [](auto& j) { j["stages"][1]["c"] = "-1"; }), "C_LADDER");
  expect_invariant(tamper(a, [](auto& j) { j["stages"][1]["n"] = 3; }), "STAGE_INDEX");
  expect_invariant(tamper(a,
                          [](auto& j) {
                            auto& p = j["stages"][1]["p"];
                            p["deg_w"] = 3;
                            for (auto& row : p["coeffs"]) row.erase(row.size() - 1);
                          }),
                   "DEGREE");
  CHECK_THROWS_AS(load_string(tamper(a, [](auto& j) { j["schema_version"] = 99; })), Error);
  CHECK_THROWS_AS(load_string("{"), Error);
  CHECK_THROWS_AS(load_string(tamper(a, [](auto& j) { j.erase("stages"); })), Error);
  try {
    load_string(tamper(a, [](auto& j) { j["schema_version"] = 99; }));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaMismatch);
  }
}

TEST_CASE("wermer ladder is checked on load") {
  GridConfig cfg;
  cfg.z_grid = 8;
  cfg.w_grid = 8;
  const std::string a = save_string(build(Mode::Wermer, cfg, 2));
  CHECK_NOTHROW(load_string(a));
  expect_invariant(tamper(a, [](auto& j) { j["stages"][1]["c"] = "0.05"; }), "C_LADDER");
}

TEST_CASE("grid exports declare their shape") {
  GridExport g;
  g.kind = ExportKind::PotentialSlice;
  g.x0 = -1, g.x1 = 1, g.nx = 3;
  g.y0 = 0, g.y1 = 1, g.ny = 2;
  g.values = {0, 1, 2, 3, 4, 5};
  const std::string csv = to_csv(g);
  CHECK(csv.find("# kind=potential_slice") == 0);
  CHECK(csv.find("n=3") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4 + 1 + 6);
  const std::string pgm = to_pgm(g, 0, 5);
  CHECK(pgm.substr(0, 2) == "P5");
  CHECK(pgm.size() >= 6);
  // top row first: pixel 0 is (x0, y1) = 3, the last is (x1, y0) = 2
  CHECK((unsigned char)pgm[pgm.size() - 6] == 153);
  CHECK((unsigned char)pgm[pgm.size() - 1] == 102);
  g.values.pop_back();
  CHECK_THROWS_AS(to_csv(g), Error);
}
