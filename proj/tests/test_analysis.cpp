#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numbers>
#include <random>

#include "wermer/analysis.hpp"
#include "wermer/errors.hpp"
#include "wermer/grid.hpp"

using namespace wermer;

namespace {

const Construction& con3() {
  static const Construction con = [] {
    GridConfig cfg;
    cfg.z_grid = 8;
    cfg.w_grid = 8;
    return build(Mode::Modified, cfg, 3);
  }();
  return con;
}

std::vector<cplx> sample_z(int count, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> out;
  while (int(out.size()) < count) {
    const cplx z = std::polar(radius * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
    out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("membership index") {
  CHECK(membership_index(0.2) == 1);
  CHECK(membership_index(1.5) == 1);
  CHECK(membership_index(cplx(0, 2.5)) == 2);
  CHECK(membership_index(3.99) == 3);
}

TEST_CASE("stage-1 fiber") {
  const auto f = fiber(con3(), 1.0, 1);
  REQUIRE(f.roots.size() == 2);
  std::vector<double> re = {f.roots.roots[0].real(), f.roots.roots[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1.0));
  CHECK(re[1] == doctest::Approx(1.0));
  CHECK(f.min_pair_gap == doctest::Approx(2.0));
  CHECK_FALSE(f.sublevel_samples.empty());
}

TEST_CASE("stage-2 fiber has four simple roots") {
  const auto f = fiber(con3(), cplx(0.4, 0.7), 2);
  CHECK(f.roots.size() == 4);
  CHECK(f.min_pair_gap > 0.0);
}

TEST_CASE("sublevel samples cluster at the roots") {
  for (int N = 2; N <= 3; ++N)
    for (const cplx& z : sample_z(5, N + 0.9, 7 + N)) {
      const auto f = fiber(con3(), z, N);
      INFO("N " << N << " z " << z);
      CHECK_FALSE(f.sublevel_samples.empty());
      CHECK(f.hausdorff_root_to_sublevel <= 1.0 / (N - 1));
    }
}

TEST_CASE("potential at roots and off the sublevel set") {
  const Construction& con = con3();
  for (const cplx& z : sample_z(10, 2.0, 3)) {
    for (std::uint32_t s = 0; s < 8; ++s) {
      const auto u = potential(con, z, FiberPoint::root(3, s), 3);
      CHECK(u.value <= -2.0 + 1e-12);
      CHECK(u.value >= -2.0 - 1e-12);
      CHECK(u.clamped_terms >= 1);
    }
  }
  // a point far from every root: every term finite, the tail bound holds
  const cplx z(0.5, 0.5), w(1.9, -0.3);
  const auto u2 = potential(con, z, w, 2), u3 = potential(con, z, w, 3);
  CHECK(u3.value >= u2.value - 0.25 - 1e-12);
  CHECK(u3.value >= -2.0);
}

TEST_CASE("separation ratio") {
  const Construction& con = con3();
  CHECK(separation_check(con, {cplx(0.3, 0.2), 0.05, 1, 512}) == doctest::Approx(2.0).epsilon(1e-12));
  std::mt19937_64 rng(17);
  for (int k = 2; k <= 3; ++k)
    for (int i = 0; i < 3; ++i) {
      const auto probe = random_probe(con, k, rng);
      CHECK(separation_check(con, probe) > 1.5);
    }
  CHECK_THROWS_AS(validate_probe(con, {cplx(0.5, 0.0), 0.5, 2, 512}), Error);
}

TEST_CASE("shadow ratios") {
  const Construction& con = con3();
  for (const cplx& z : sample_z(10, 2.0, 23)) {
    CHECK(shadow_check(con, z, 2, 2) == doctest::Approx(0.0));
    CHECK(shadow_check(con, z, 2, 1) <= 0.1 + 1e-12);
    CHECK(shadow_check(con, z, 3, 1) < 1.0 / 9.0);
    CHECK(shadow_check(con, z, 3, 2) < 1.0 / 9.0);
    CHECK(shadow_check_sublevel(con, z, 3, 1) < 0.25);
  }
}

TEST_CASE("jump at a cut crossing") {
  const Construction& con = con3();
  for (int k = 1; k <= 3; ++k) {
    const CircleProbe probe{con.table[k - 1] + cplx(0.01, 0.02), 0.07, k, 512};
    const auto z1 = cut_crossing(con, probe);
    REQUIRE(z1);
    const auto [jump, ref] = jump_check(con, probe, *z1);
    INFO("k " << k << " jump " << jump << " ref " << ref);
    CHECK(jump >= ref - 1e-8);
    CHECK(std::abs(jump - ref) <= 1e-8 * std::max(1.0, ref));
  }
  // no branch point inside: continuation closes up
  const CircleProbe empty{cplx(0.5, 0.5), 0.1, 2, 512};
  CHECK_FALSE(cut_crossing(con, empty));
  CHECK(jump_check(con, empty, empty.center + empty.radius).first < 1e-9);
}

TEST_CASE("sub-mean-value sanity") {
  const auto harmonic = sub_mean_value([](cplx z) { return z.real(); }, {0.0, cplx(1, 2)}, {0.1, 0.5}, 64, 1e-12);
  CHECK(harmonic.violations == 0);
  CHECK(std::abs(harmonic.worst_excess) < 1e-12);
  const auto convex = sub_mean_value([](cplx z) { return -std::norm(z); }, {0.0}, {0.5}, 64, 1e-3);
  CHECK(convex.violations == 1);
}

TEST_CASE("fiber max potential is subharmonic on samples") {
  const Construction& con = con3();
  const auto rep = fiber_max_subharmonicity(con, sample_z(6, 2.0, 41), 3, {0.05, 0.2}, 64, 1e-3);
  CHECK(rep.checks == 12);
  CHECK(rep.violations == 0);
}

TEST_CASE("E cloud over a segment") {
  const Construction& con = con3();
  const auto cloud = extract_E(con, segment_sampler(0.0, 1.0, 11), 1);
  REQUIRE(cloud.size() == 22);
  for (std::size_t i = 0; i < cloud.size(); i += 2) {
    const double s = cloud[i].s.real();
    CHECK(cloud[i].s == cloud[i + 1].s);
    CHECK(std::abs(std::abs(cloud[i].w) - std::sqrt(s)) < 1e-12);
    CHECK(std::abs(cloud[i].w + cloud[i + 1].w) < 1e-12);
  }
  const auto c3 = extract_E(con, circle_sampler(0.3, 0.4, 9), 3);
  CHECK(c3.size() == 9 * 8);
}
