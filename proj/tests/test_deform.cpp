#include <cmath>
#include <complex>

#include "doctest.h"
#include "schottky/deform.hpp"
#include "test_fixtures.hpp"

using namespace schottky;
using fixtures::cyclic;
using fixtures::four_disk;
using fixtures::pt;

namespace {

bool same_group(const SchottkyGroup& a, const SchottkyGroup& b) {
  if (a.rank() != b.rank() || a.disks().size() != b.disks().size()) return false;
  for (int k = 1; k <= a.rank(); ++k) {
    const MoebiusMap &ga = a.generator(k), &gb = b.generator(k);
    if (ga.a != gb.a || ga.b != gb.b || ga.c != gb.c || ga.d != gb.d) return false;
  }
  for (std::size_t i = 0; i < a.disks().size(); ++i) {
    const OrientedDisk &da = a.disks()[i], &db = b.disks()[i];
    if (da.center != db.center || da.radius != db.radius ||
        da.unbounded_side != db.unbounded_side)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("paths reproduce the base group exactly at t = 0") {
  const auto g = four_disk();
  for (const PathKind kind :
       {PathKind::RadiusPinch, PathKind::MultiplierPinch, PathKind::CircleCollision}) {
    PathSpec spec;
    spec.kind = kind;
    const auto path = make_path(g, spec);
    CHECK(same_group(path.group_at(0.0), g));
    CHECK(path.t_max() == 1.0);
  }

  PathSpec spec;
  spec.kind = PathKind::MultiplierPinch;
  const auto path = make_path(cyclic(0.1), spec);
  CHECK(same_group(path.group_at(0.0), cyclic(0.1)));
  CHECK_THROWS_AS(path.group_at(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(path.group_at(1.1), std::invalid_argument);
}

TEST_CASE("radius pinch reaches tangency exactly at t = 1") {
  PathSpec spec;
  spec.kind = PathKind::RadiusPinch;
  const auto path = make_path(four_disk(), spec);

  const auto mid = validate_schottky(path.group_at(0.5));
  CHECK(mid.valid);
  CHECK(mid.min_gap > 0.0);
  CHECK(mid.min_gap < validate_schottky(path.group_at(0.0)).min_gap);

  const auto end = validate_schottky(path.group_at(1.0));
  CHECK(!end.valid);
  CHECK(std::abs(end.min_gap) <= 1e-9);
}

TEST_CASE("multiplier pinch is parabolic at t = 1") {
  PathSpec spec;
  spec.kind = PathKind::MultiplierPinch;
  const auto path = make_path(cyclic(0.1), spec);

  CHECK(validate_schottky(path.group_at(0.5)).valid);

  const auto end = path.group_at(1.0);
  CHECK(end.generator(1).normalized().trace() == cplx(2.0, 0.0));
  const auto rep = validate_schottky(end);
  CHECK(!rep.valid);
  bool loxodromy_failed = false;
  for (const auto& c : rep.checks)
    if (!c.passed && c.name.find("loxodrom") != std::string::npos) loxodromy_failed = true;
  CHECK(loxodromy_failed);
}

TEST_CASE("circle collision touches the target at the collision time") {
  PathSpec spec;
  spec.kind = PathKind::CircleCollision;
  spec.mover_disk = 1;
  spec.target_disk = 3;
  spec.collision_time = 1.0;
  const auto path = make_path(four_disk(), spec);

  CHECK(validate_schottky(path.group_at(0.5)).valid);
  const auto end = validate_schottky(path.group_at(1.0));
  CHECK(!end.valid);
  CHECK(std::abs(end.min_gap) <= 1e-9);

  // only the mover's center moves
  const auto g_mid = path.group_at(0.5);
  CHECK(g_mid.disks()[0].center != four_disk().disks()[0].center);
  CHECK(g_mid.disks()[0].radius == 0.5);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(g_mid.disks()[i].center == four_disk().disks()[i].center);
    CHECK(g_mid.disks()[i].radius == four_disk().disks()[i].radius);
  }
}

TEST_CASE("path construction rejects unusable specs") {
  const auto g = four_disk();

  PathSpec same;
  same.kind = PathKind::CircleCollision;
  same.mover_disk = 2;
  same.target_disk = 2;
  CHECK_THROWS_AS(make_path(g, same), BadSpec);

  PathSpec range;
  range.kind = PathKind::CircleCollision;
  range.target_disk = 9;
  CHECK_THROWS_AS(make_path(g, range), BadSpec);

  PathSpec instant;
  instant.kind = PathKind::CircleCollision;
  instant.collision_time = 0.0;
  CHECK_THROWS_AS(make_path(g, instant), BadSpec);

  PathSpec negative;
  negative.t_max = -0.5;
  CHECK_THROWS_AS(make_path(g, negative), BadSpec);

  // the radius family needs bounded disks; the rank-1 fixture has one
  // unbounded side
  PathSpec pinch;
  pinch.kind = PathKind::RadiusPinch;
  CHECK_THROWS_AS(make_path(cyclic(0.1), pinch), BadSpec);

  // a generator that pairs the disks through an extra non-rotational
  // self-map cannot be reproduced by any twist
  const MoebiusMap to_unit{cplx(1.0), cplx(-2.0), cplx(0.0), cplx(0.5)};
  const MoebiusMap blaschke{cplx(1.0), cplx(-0.3), cplx(-0.3), cplx(1.0)};
  const MoebiusMap twisted = g.generator(1) * to_unit.inverse() * blaschke * to_unit;
  const SchottkyGroup bad({twisted, g.generator(2)}, g.disks());
  CHECK(validate_schottky(bad).valid);  // geometrically still a valid pairing
  CHECK_THROWS_AS(make_path(bad, pinch), BadSpec);
}

TEST_CASE("indicator split partitions the series") {
  const auto g = four_disk();
  const auto cloud = limit_set_cloud(g, 4);
  const ProjectivePoint y = pt(0.1), q = pt(-0.3), x = pt(0.2, 0.4), p = pt(-0.1, -0.5);

  const auto gr = green_series(g, y, q, x, p, 6);
  for (const double eps : {0.0, 1e-3, 0.05, 0.5, 3.0}) {
    for (const SplitMode mode : {SplitMode::Value, SplitMode::Orbit}) {
      const auto sp = split_sums(g, cloud, eps, y, q, x, p, 6, mode);
      CHECK(sp.total == sp.omega_part + sp.lambda_part);  // single-add identity
      CHECK(sp.estimate.total == gr.total);               // one-accumulator twin
      REQUIRE(sp.lambda_flags.size() == 1457);            // rank-2 ball of radius 6
    }
  }
}

TEST_CASE("split extremes: empty and full near-limit parts") {
  const auto g = four_disk();
  const auto cloud = limit_set_cloud(g, 4);
  const ProjectivePoint y = pt(0.1), q = pt(-0.3), x = pt(0.2, 0.4), p = pt(-0.1, -0.5);

  // nothing sits exactly on the cloud points
  const auto none = split_sums(g, cloud, 0.0, y, q, x, p, 6);
  CHECK(none.lambda_part == 0.0);
  CHECK(none.total == none.omega_part);

  // the spherical diameter is 2, so eps = 3 captures every term
  const auto all = split_sums(g, cloud, 3.0, y, q, x, p, 6);
  CHECK(all.omega_part == 0.0);
  CHECK(all.total == all.lambda_part);

  const auto all_orbit = split_sums(g, cloud, 3.0, y, q, x, p, 6, SplitMode::Orbit);
  CHECK(all_orbit.omega_part == 0.0);

  CHECK_THROWS_AS(split_sums(g, cloud, -1.0, y, q, x, p, 6), std::invalid_argument);
}

TEST_CASE("scan: constant path, grid shape, graceful invalidity") {
  const auto g = four_disk();
  ScanParams params;
  params.n_steps = 3;
  params.y = pt(0.1);
  params.q = pt(-0.3);
  params.x = pt(0.2, 0.4);
  params.p = pt(-0.1, -0.5);
  params.z0 = pt(0.3, 0.2);
  params.max_len = 6;
  params.cloud_depth = 3;
  params.eps = 0.05;

  // a zero-length path scans the base repeatedly: identical steps
  PathSpec frozen;
  frozen.kind = PathKind::RadiusPinch;
  frozen.t_max = 0.0;
  const auto flat = scan_path(make_path(g, frozen), params);
  CHECK(flat.kind == PathKind::RadiusPinch);
  REQUIRE(flat.steps.size() == 3);
  for (const auto& s : flat.steps) {
    CHECK(s.t == 0.0);
    CHECK(s.valid);
    CHECK(s.error.empty());
    CHECK(s.min_gap == flat.steps[0].min_gap);
    CHECK(s.delta_hat == flat.steps[0].delta_hat);
    CHECK(s.green_total == flat.steps[0].green_total);
    CHECK(s.split_total == s.omega_part + s.lambda_part);
  }

  ScanParams bad = params;
  bad.n_steps = 1;
  CHECK_THROWS_AS(scan_path(make_path(g, frozen), bad), std::invalid_argument);

  // a multiplier pinch on the rank-1 fixture turns parabolic at the end:
  // the last step is reported invalid and the scan still completes
  PathSpec pinch;
  pinch.kind = PathKind::MultiplierPinch;
  ScanParams cy = params;
  cy.y = pt(2.0);
  cy.q = pt(3.0);
  cy.x = pt(1.0);
  cy.p = pt(4.0);
  cy.z0 = pt(0.3, 0.2);
  const auto rep = scan_path(make_path(cyclic(0.1), pinch), cy);
  REQUIRE(rep.steps.size() == 3);
  CHECK(rep.steps[0].valid);
  CHECK(rep.steps[1].valid);
  CHECK(!rep.steps[2].valid);
  CHECK(rep.steps[2].error.empty());
  CHECK(rep.steps[0].series_verdict == Verdict::Converging);
}
