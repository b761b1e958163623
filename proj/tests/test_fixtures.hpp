#pragma once

// Shared fixture groups for the unit tests.

#include <vector>

#include "schottky/complex_geom.hpp"
#include "schottky/group.hpp"

namespace fixtures {

using schottky::cplx;
using schottky::MoebiusMap;
using schottky::OrientedDisk;
using schottky::ProjectivePoint;
using schottky::SchottkyGroup;

// Rank-1 group z -> q z with fundamental annulus |q| <= |z| <= 1.
inline SchottkyGroup cyclic(double q) {
  std::vector<MoebiusMap> gens{MoebiusMap{cplx(q), cplx(0.0), cplx(0.0), cplx(1.0)}};
  std::vector<OrientedDisk> disks{{cplx(0.0), 1.0, true}, {cplx(0.0), q, false}};
  return SchottkyGroup(gens, disks);
}

// Rank-2 group on four disks of radius r centered at +-2 and +-2i,
// generators the zero-twist inversive pairings.
inline SchottkyGroup four_disk(double r = 0.5) {
  OrientedDisk d1{cplx(2.0, 0.0), r, false}, d1p{cplx(-2.0, 0.0), r, false};
  OrientedDisk d2{cplx(0.0, 2.0), r, false}, d2p{cplx(0.0, -2.0), r, false};
  std::vector<MoebiusMap> gens{schottky::pairing_map(d1, d1p, 0.0),
                               schottky::pairing_map(d2, d2p, 0.0)};
  return SchottkyGroup(gens, {d1, d1p, d2, d2p});
}

inline ProjectivePoint pt(double re, double im = 0.0) {
  return ProjectivePoint::from_complex(cplx(re, im));
}

}  // namespace fixtures
