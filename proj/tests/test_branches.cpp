#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numbers>
#include <random>

#include "wermer/bi_poly.hpp"
#include "wermer/collision.hpp"
#include "wermer/root_finding.hpp"

using namespace wermer;

namespace {

StageFunctionSet make_fs(const BranchPointTable& table, std::vector<double> c, std::vector<ZPoly> Z) {
  StageFunctionSet fs;
  fs.n = int(c.size());
  fs.c = std::move(c);
  fs.Z = std::move(Z);
  fs.cuts = make_cuts(table, fs.n);
  for (int j = 0; j < fs.n; ++j) fs.a.push_back(table[j]);
  return fs;
}

// p_1 = w^2 - c^2 (z - a_1), then shift_product down the ladder in double.
BiPoly<cplx> dense_p(const StageFunctionSet& fs, const BranchPointTable& table) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 3);
  const double c1 = fs.c[0];
  t(0, 0) = c1 * c1 * table[0];
  t(1, 0) = -c1 * c1;
  t(0, 2) = 1.0;
  BiPoly<cplx> p = make_bipoly(t);
  for (int n = 1; n < fs.n; ++n) {
    std::vector<std::pair<cplx, int>> r = fs.Z[n].roots;
    for (auto& q : r) q.second *= 2;
    for (int l = 0; l < n; ++l) r.push_back({table[l], 2});
    r.push_back({table[n], 1});
    p = shift_product(p, cplx(fs.c[n]), UniPoly<cplx>::from_roots(r));
  }
  return p;
}

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cplx> expand(const RootSet<cplx>& r) {
  std::vector<cplx> out;
  for (std::size_t k = 0; k < r.size(); ++k)
    for (int m = 0; m < r.multiplicities[k]; ++m) out.push_back(r.roots[k]);
  return out;
}

}  // namespace

TEST_CASE("branch point enumeration") {
  const auto t = enumerate_branch_points(8);
  REQUIRE(t.size() == 8);
  const std::vector<cplx> expect{{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}};
  for (std::size_t k = 0; k < expect.size(); ++k) CHECK(t[k] == expect[k]);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(t[k]) < double(k + 1));
  // Prefix stable.
  const auto longer = enumerate_branch_points(20);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(longer.points[k] == t.points[k]);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("-3/6") == make_rational(-1, 2));
  CHECK(to_string(make_rational(4, -8)) == "-1/2");
  CHECK(to_string(make_rational(3, 1)) == "3");
  CHECK_THROWS_AS(parse_rational("x/2"), Error);
}

TEST_CASE("sqrt_cut and beta") {
  const auto table = enumerate_branch_points(4);
  const auto cuts = make_cuts(table, 3);
  const cplx b = beta_eval(1, cplx(4, 0), cuts);
  CHECK(std::abs(b * b - 4.0) < 1e-14);
  CHECK((std::abs(b - 2.0) < 1e-14 || std::abs(b + 2.0) < 1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 100; ++k) {
    const cplx z(u(rng), u(rng));
    const double expect = std::abs(z - table[0]) * std::sqrt(std::abs(z - table[1]));
    CHECK(std::abs(std::abs(beta_eval(2, z, cuts)) - expect) < 1e-12 * std::max(1.0, expect));
  }

  // Counterclockwise-side limit on the cut.
  const cplx d = cuts[0].direction;
  const cplx on = sqrt_cut(2.0 * d, d);
  const cplx ccw = sqrt_cut(2.0 * d * std::polar(1.0, 1e-9), d);
  CHECK(std::abs(on - ccw) < 1e-8);
  const cplx cw = sqrt_cut(2.0 * d * std::polar(1.0, -1e-9), d);
  CHECK(std::abs(on + cw) < 1e-8);
}

TEST_CASE("beta is continuous off its cut") {
  const auto table = enumerate_branch_points(4);
  const auto cuts = make_cuts(table, 3);
  // Segment on the side opposite to cut 2.
  const cplx a2 = table[1];
  const cplx away = -cuts[1].direction;
  cplx prev = beta_eval(2, a2 + away + cplx(0, 0), cuts);
  double worst = 0.0;
  const int steps = 1000;
  const cplx dir = away * cplx(0, 1);
  for (int k = 1; k <= steps; ++k) {
    const cplx z = a2 + away + dir * (double(k) / steps);
    const cplx v = beta_eval(2, z, cuts);
    worst = std::max(worst, std::abs(v - prev) / (1.0 / steps));
    prev = v;
  }
  CHECK(worst < 10.0);
}

TEST_CASE("branch values and gaps") {
  const auto table = enumerate_branch_points(4);
  const auto fs = make_fs(table, {1.0}, {ZPoly{}});
  const cplx h = branch_eval({1, 0}, cplx(4, 0), fs);
  CHECK(std::abs(h * h - 4.0) < 1e-14);
  // h_s(a_1) independent of s_1.
  CHECK(std::abs(branch_eval({1, 0}, table[0], fs) - branch_eval({1, 1}, table[0], fs)) == 0.0);

  const auto fs3 = make_fs(table, {1.0, 0.03, 0.0005}, {ZPoly{}, ZPoly{}, ZPoly{}});
  const cplx z(0.4, -1.3);
  const auto T = fs3.terms(z);
  const auto vals = branch_values(T);
  for (std::uint32_t s = 0; s < 8; ++s)
    for (std::uint32_t t = 0; t < 8; ++t) {
      CHECK(std::abs(branch_gap(s, 3, t, 3, T) - (vals[s] - vals[t])) < 1e-13);
      // Global sign symmetry.
      CHECK(std::abs(std::abs(vals[s] - vals[t]) - std::abs(vals[s ^ 7u] - vals[t ^ 7u])) < 1e-13);
    }
  // Shorter vector: missing signs count as zero.
  CHECK(std::abs(branch_gap(0, 3, 0, 2, T) - T[2]) < 1e-15);
}

TEST_CASE("branches equal dense roots through stage 3") {
  const auto table = enumerate_branch_points(4);
  auto fs2 = make_fs(table, {1.0, 0.04}, {ZPoly{}, ZPoly{}});
  const ZPoly Z2 = compute_Z(2, fs2);
  auto fs3 = make_fs(table, {1.0, 0.04, 0.0002}, {ZPoly{}, ZPoly{}, Z2});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (const auto* fs : {&fs2, &fs3}) {
    const auto p = dense_p(*fs, table);
    CHECK(p.deg_w() == (1 << fs->n));
    for (int k = 0; k < 20; ++k) {
      const cplx z(u(rng), u(rng));
      const auto roots = roots_in_w(p, z, 0.0);
      const auto vals = branch_values(fs->terms(z));
      CHECK(multiset_distance(vals, expand(roots)) < 1e-8);
    }
  }
}

TEST_CASE("Z_2 matches the explicit radical equation") {
  const auto table = enumerate_branch_points(4);
  const double c1 = 1.0, c2 = 0.04;
  const auto fs = make_fs(table, {c1, c2}, {ZPoly{}, ZPoly{}});
  const ZPoly Z = compute_Z(2, fs);
  // (z - a1)(z - a2) = (c1/c2)^2
  const cplx a1 = table[0], a2 = table[1];
  const cplx b = -(a1 + a2), c = a1 * a2 - (c1 / c2) * (c1 / c2);
  const cplx disc = std::sqrt(b * b - 4.0 * c);
  const std::vector<cplx> expect{(-b + disc) / 2.0, (-b - disc) / 2.0};
  REQUIRE(Z.roots.size() == 2);
  for (const auto& e : expect) {
    const auto it = std::find_if(Z.roots.begin(), Z.roots.end(), [&](const auto& r) { return std::abs(r.first - e) < 1e-8; });
    REQUIRE(it != Z.roots.end());
    CHECK(it->second == 1);
  }
  for (const auto& [r, m] : Z.roots)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(r - table[j]) > 1e-5);
}

TEST_CASE("Z chain containment at stage 3") {
  const auto table = enumerate_branch_points(4);
  const auto fs2 = make_fs(table, {1.0, 0.04}, {ZPoly{}, ZPoly{}});
  const ZPoly Z2 = compute_Z(2, fs2);
  const auto fs3 = make_fs(table, {1.0, 0.04, 0.0002}, {ZPoly{}, ZPoly{}, Z2});
  const ZPoly Z3 = compute_Z(3, fs3);
  CHECK(Z3.contains(Z2, 1e-8));
  CHECK(Z3.degree() > Z2.degree());
  for (const auto& [r, m] : Z3.roots)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(r - table[j]) > 1e-5);
  // Every root is a genuine collision of two branches of g_3.
  for (const auto& [r, m] : Z3.roots) {
    const auto vals = branch_values(fs3.terms(r));
    double best = std::numeric_limits<double>::infinity(), scale = 0.0;
    for (std::size_t s = 0; s < vals.size(); ++s) {
      scale = std::max(scale, std::abs(vals[s]));
      for (std::size_t t = s + 1; t < vals.size(); ++t) best = std::min(best, std::abs(vals[s] - vals[t]));
    }
    CHECK(best < 1e-7 * scale);
  }
}

TEST_CASE("collision order of a simple zero") {
  const auto table = enumerate_branch_points(4);
  const auto fs = make_fs(table, {1.0, 0.04}, {ZPoly{}, ZPoly{}});
  const ZPoly Z = compute_Z(2, fs);
  for (const auto& [r, m] : Z.roots) CHECK(collision_order(fs, r, 0.01) == 1);
  // Generic point: no collision.
  CHECK(collision_order(fs, cplx(0.3, 0.7), 0.01) == 0);
}

TEST_CASE("monodromy by continuation") {
  const auto table = enumerate_branch_points(4);
  const auto fs = make_fs(table, {1.0, 0.04, 0.0002}, {ZPoly{}, ZPoly{}, ZPoly{}});
  const SignVector s{3, 0b010};
  // Around a_1 = 0 only.
  CHECK(monodromy(cplx(0, 0), 0.5, s, fs, table) == s.flipped(1));
  // Around nothing.
  CHECK(monodromy(cplx(2, 2), 0.5, s, fs, table) == s);
  // Around a_1 and a_2.
  CHECK(monodromy(cplx(0.5, 0), 0.8, s, fs, table) == s.flipped(1).flipped(2));
  CHECK(monodromy(cplx(0.5, 0), 0.8, s, fs, table) == predicted_monodromy(cplx(0.5, 0), 0.8, s, fs));
  // Twice round is the identity.
  const auto once = monodromy(cplx(0, 1), 0.3, s, fs, table);
  CHECK(once == s.flipped(3));
  CHECK(monodromy(cplx(0, 1), 0.3, once, fs, table) == s);
  CHECK_THROWS_AS(monodromy(cplx(0, 0), 1.0, s, fs, table), Error);
}
