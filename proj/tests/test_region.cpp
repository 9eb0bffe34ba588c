#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lab/construction.hpp"
#include "lab/errors.hpp"
#include "lab/region.hpp"

using namespace lab;

namespace {
RegionQuery qr(double r, double theta, double gamma = 2.0) {
  RegionQuery q;
  q.r = r;
  q.theta = theta;
  q.gamma = gamma;
  return q;
}
}  // namespace

TEST_CASE("velocity admissibility at the hand-checked points") {
  // supremum norm, steepest amplitude decay: theta + 3/r = 2, low branch
  auto v = nse_admissible(qr(INFINITY, 2.0));
  CHECK(v.admissible);
  CHECK(v.branch == 1);
  CHECK(v.reason.empty());

  // r=2, theta=7/4: theta + 3/r = 3.25, 2 theta + 3/r = 5 <= 11/2
  v = nse_admissible(qr(2.0, 1.75));
  CHECK(v.admissible);
  CHECK(v.branch == 2);

  // r=2, theta=8/5: theta + 3/r = 3.1 leaves branch 1, and the high branch
  // holds since 2 theta + 3/r = 4.7 stays under 11/2
  v = nse_admissible(qr(2.0, 1.6));
  CHECK(v.admissible);
  CHECK(v.branch == 2);

  // theta + 3/r = 3 exactly belongs to the high branch
  v = nse_admissible(qr(3.0, 2.0));
  CHECK(v.admissible);
  CHECK(v.branch == 2);

  // r=8/5, theta=2: 2 theta + 3/r = 5.875 breaks the half-integer cap
  v = nse_admissible(qr(1.6, 2.0));
  CHECK(!v.admissible);
  CHECK(v.branch == 0);
  CHECK(v.reason == "branch1: theta + 3/r at least 3; branch2: 2*theta + 3/r above 11/2");

  // r=infinity, theta=8/5: theta + 3/r = 1.6 undershoots both branches
  v = nse_admissible(qr(INFINITY, 1.6));
  CHECK(!v.admissible);
  CHECK(v.reason == "branch1: theta + 3/r below 2; branch2: theta + 3/r below 3");

  // r below 3/2 with theta + 3/r past 3 has no branch left
  v = nse_admissible(qr(1.25, 2.0));
  CHECK(!v.admissible);
  CHECK(v.reason == "branch1: theta + 3/r at least 3; branch2: r below 3/2");

  // the smoothness indices the queries imply
  CHECK(qr(INFINITY, 2.0).s_u() == doctest::Approx(-1.0));
  CHECK(qr(2.0, 1.75).s_u() == doctest::Approx(0.25));
}

TEST_CASE("coupled admissibility at the hand-checked points") {
  auto v = mhd_admissible(qr(INFINITY, 2.0, 2.0));
  CHECK(v.admissible);
  CHECK(v.branch == 1);

  // r=2, theta=gamma=2: theta + gamma + 3/r = 11/2, boundary of branch 2
  v = mhd_admissible(qr(2.0, 2.0, 2.0));
  CHECK(v.admissible);
  CHECK(v.branch == 2);

  // theta + gamma = 4.6 breaks the global amplitude budget
  v = mhd_admissible(qr(2.0, 2.0, 2.6));
  CHECK(!v.admissible);
  CHECK(v.reason == "theta + gamma must not exceed 4");

  // gamma barely above 3/2 opens shallow magnetic decay on branch 2
  v = mhd_admissible(qr(2.0, 2.0, 1.6));
  CHECK(v.admissible);
  CHECK(v.branch == 2);
}

TEST_CASE("predicates are total: junk parameters get verdicts, not exceptions") {
  CHECK(!nse_admissible(qr(0.5, 2.0)).admissible);
  CHECK(nse_admissible(qr(0.5, 2.0)).reason == "r must exceed 1");
  CHECK(!nse_admissible(qr(2.0, 5.0)).admissible);
  CHECK(nse_admissible(qr(2.0, 5.0)).reason == "theta must not exceed 2");
  CHECK(!nse_admissible(qr(2.0, 1.5)).admissible);  // boundary theta excluded
  CHECK(!nse_admissible(qr(NAN, NAN)).admissible);
  CHECK(!mhd_admissible(qr(2.0, 2.0, NAN)).admissible);
  CHECK(!mhd_admissible(qr(2.0, 2.0, 1.5)).admissible);  // boundary gamma excluded
}

TEST_CASE("the half-integer cap toggle only moves boundary points") {
  RegionOptions strict;
  strict.strict_half_integer_bound = true;

  // 2 theta + 3/r = 5.5 exactly: admissible by default, not under the toggle
  auto v = nse_admissible(qr(2.0, 2.0));
  CHECK(v.admissible);
  v = nse_admissible(qr(2.0, 2.0), strict);
  CHECK(!v.admissible);
  CHECK(v.reason == "branch1: theta + 3/r at least 3; branch2: 2*theta + 3/r above 11/2");

  // interior points do not move
  CHECK(nse_admissible(qr(2.0, 1.75), strict).admissible);
  CHECK(nse_admissible(qr(2.0, 1.6), strict).admissible);
  CHECK(!nse_admissible(qr(1.6, 2.0), strict).admissible);

  // same flip for the coupled cap theta + gamma + 3/r = 11/2
  CHECK(mhd_admissible(qr(2.0, 2.0, 2.0)).admissible);
  CHECK(!mhd_admissible(qr(2.0, 2.0, 2.0), strict).admissible);
}

TEST_CASE("plane points: the region holds (0,-1) and omits (1/2, 0)") {
  // inv_r = 0, s = -1 solves to theta = 2 at r = infinity
  CHECK(nse_point_admissible(0.0, -1.0));
  // inv_r = 1/2, s = 0 needs theta = 3/2, outside the open range
  CHECK(!nse_point_admissible(0.5, 0.0));
  // same inv_r slightly higher lands inside
  CHECK(nse_point_admissible(0.5, 0.25));
  // out-of-plane inputs are rejected rather than extrapolated
  CHECK(!nse_point_admissible(-0.25, -1.0));
  CHECK(!nse_point_admissible(1.0, 0.5));
}

TEST_CASE("grid sweep: corners, area convergence, and csv shape") {
  CHECK_THROWS_AS(emit_region_grid(4, RegionMode::nse), lab::Error);

  auto g8 = emit_region_grid(8, RegionMode::nse);
  REQUIRE(g8.size() == 64);
  // first sample: inv_r = 0, theta just above 3/2; last: inv_r = 7/8, theta = 2
  CHECK(g8.front().inv_r == 0.0);
  CHECK(g8.front().theta == doctest::Approx(1.5 + 0.5 / 8));
  CHECK(g8.back().inv_r == doctest::Approx(0.875));
  CHECK(g8.back().theta == doctest::Approx(2.0));
  // the (inv_r=0, theta=2) sample maps to the plane point (0, -1), inside
  const RegionSample& corner = g8[7];
  CHECK(corner.inv_r == 0.0);
  CHECK(corner.theta == doctest::Approx(2.0));
  CHECK(corner.s == doctest::Approx(-1.0));
  CHECK(corner.admissible);

  const double a64 = region_area(emit_region_grid(64, RegionMode::nse));
  const double a128 = region_area(emit_region_grid(128, RegionMode::nse));
  CHECK(a64 > 0.1);
  CHECK(a64 < 0.9);
  CHECK(std::abs(a64 - a128) / a128 < 0.05);

  // coupled region shrinks as gamma leaves the sweet spot
  const double m20 = region_area(emit_region_grid(64, RegionMode::mhd, 2.0));
  const double m24 = region_area(emit_region_grid(64, RegionMode::mhd, 2.4));
  CHECK(m20 > 0.0);
  CHECK(m24 < m20);

  const std::string csv = region_csv(g8);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "inv_r,s,theta,gamma,admissible,branch");
  size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 64);
}

TEST_CASE("boundary segments trace the admissibility flips") {
  const int res = 32;
  auto g = emit_region_grid(res, RegionMode::nse);
  auto segs = region_boundary(g, res);
  CHECK(segs.size() > static_cast<size_t>(res) / 2);
  for (const auto& s : segs) {
    // endpoints stay inside the sheared sweep window and are distinct
    CHECK(s[0] >= 0.0);
    CHECK(s[0] <= 1.0);
    CHECK(s[2] >= 0.0);
    CHECK(s[2] <= 1.0);
    CHECK(s[1] >= -1.5);
    CHECK(s[1] <= 3.0);
    CHECK((s[0] != s[2] || s[1] != s[3]));
  }
  CHECK_THROWS_AS(region_boundary(g, res + 1), lab::Error);
}

TEST_CASE("admissible parameters always pass the construction gate") {
  // every admissible sample must validate and admit a 3-stage lacunary
  // sequence, so a sweep can drive the construction end to end
  auto g = emit_region_grid(16, RegionMode::nse);
  auto gm = emit_region_grid(16, RegionMode::mhd, 1.9);
  size_t checked = 0;
  for (const RegionSample& s : g) {
    if (!s.admissible) continue;
    ConstructionParams p;
    p.theta = s.theta;
    p.stages = 3;
    CHECK_NOTHROW(validate_params(p));
    CHECK(lacunary_sequence(p).size() == 3);
    ++checked;
  }
  for (const RegionSample& s : gm) {
    if (!s.admissible) continue;
    ConstructionParams p;
    p.theta = s.theta;
    p.gamma = s.gamma;
    p.mhd = true;
    p.stages = 3;
    CHECK_NOTHROW(validate_params(p));
    CHECK(lacunary_sequence(p).size() == 3);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("matched-index coupled region projects into the velocity region") {
  // with gamma = theta the coupled branch conditions imply the velocity
  // ones, so every admissible (r, theta) slice must survive dropping the
  // magnetic field.  (With gamma below theta that fails by design: branch 2
  // trades velocity decay against magnetic decay, e.g. r=1.6, theta=2,
  // gamma=1.6 is coupled-admissible while the velocity-only cap
  // 2*theta + 3/r = 5.875 > 11/2 rejects it.)
  const int res = 48;
  for (int i = 0; i < res; ++i) {
    const double inv_r = static_cast<double>(i) / res;
    for (int k = 0; k < res; ++k) {
      const double theta = 1.5 + 0.5 * (k + 1) / res;
      RegionQuery q = qr(inv_r == 0.0 ? INFINITY : 1.0 / inv_r, theta, theta);
      if (mhd_admissible(q).admissible) CHECK(nse_admissible(q).admissible);
    }
  }
  RegionQuery cx = qr(1.6, 2.0, 1.6);
  CHECK(mhd_admissible(cx).admissible);
  CHECK(!nse_admissible(cx).admissible);
}
