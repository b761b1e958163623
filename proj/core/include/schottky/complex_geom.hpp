#pragma once

#include <complex>

#include "schottky/errors.hpp"

namespace schottky {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Points of the Riemann sphere in homogeneous coordinates.
//
// (u : v) is the point u/v, infinity is (1 : 0), and (0, 0) is not a point.
// Two coordinate pairs name the same point iff u1*v2 - u2*v1 = 0.  Working
// homogeneously keeps every kernel free of special cases at infinity.
// ---------------------------------------------------------------------------
struct ProjectivePoint {
  cplx u{0.0, 0.0};
  cplx v{1.0, 0.0};

  static ProjectivePoint from_complex(cplx z) { return {z, cplx(1.0, 0.0)}; }
  static ProjectivePoint infinity() { return {cplx(1.0, 0.0), cplx(0.0, 0.0)}; }

  double coord_norm() const;              // sqrt(|u|^2 + |v|^2)
  ProjectivePoint normalized() const;     // coord_norm scaled to 1
  bool is_infinite() const { return v == cplx(0.0, 0.0); }
  cplx to_complex() const;                // affine value; infinity -> (inf, inf)
};

// det(p, q) = p.u*q.v - q.u*p.v.  Vanishes iff p and q are the same point.
// For affine points it reduces to (p - q) times the coordinate scales.
cplx det2(const ProjectivePoint& p, const ProjectivePoint& q);

// Chordal distance on the sphere of diameter 2: 2|det(p,q)| / (|p| |q|).
double chordal(const ProjectivePoint& p, const ProjectivePoint& q);

bool approx_equal(const ProjectivePoint& p, const ProjectivePoint& q,
                  double tol = 1e-12);

// ---------------------------------------------------------------------------
// Moebius transformation z -> (a z + b) / (c z + d), acting on homogeneous
// coordinates as the matrix [[a, b], [c, d]].
// ---------------------------------------------------------------------------
struct MoebiusMap {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static MoebiusMap identity() { return {}; }

  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }

  // Scales so det = 1, dividing by the principal square root of det (the root
  // with nonnegative real part, positive imaginary part on the negative-real
  // cut).  Throws std::invalid_argument when det is numerically zero.
  MoebiusMap normalized() const;

  // Inverse of a det-1 map: the adjugate (d, -b; -c, a).
  MoebiusMap inverse() const { return {d, -b, -c, a}; }

  ProjectivePoint operator()(const ProjectivePoint& p) const {
    return ProjectivePoint{a * p.u + b * p.v, c * p.u + d * p.v}.normalized();
  }

  cplx apply_affine(cplx z) const { return (a * z + b) / (c * z + d); }

  // d/dz of the affine action: det / (c z + d)^2.
  cplx derivative_affine(cplx z) const {
    const cplx w = c * z + d;
    return det() / (w * w);
  }

  friend MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
};

// ---------------------------------------------------------------------------
// Cross-ratio <a,b,c,d> = (a-c)(b-d) / ((a-d)(b-c)), computed entirely through
// homogeneous determinants:  det(a,c) det(b,d) / (det(a,d) det(b,c)).
// No affine division happens inside the kernel, so quadruples involving
// infinity need no special handling.  Returned as a point (num : den).
// Throws DegenerateCrossRatio when both products are below 1e-300.
// ---------------------------------------------------------------------------
ProjectivePoint cross_ratio(const ProjectivePoint& a, const ProjectivePoint& b,
                            const ProjectivePoint& c, const ProjectivePoint& d);

cplx cross_ratio_value(const ProjectivePoint& a, const ProjectivePoint& b,
                       const ProjectivePoint& c, const ProjectivePoint& d);

// ---------------------------------------------------------------------------
// Attracting/repelling fixed points and the multiplier q, |q| < 1 at the
// attracting point.  Throws NotLoxodromic when trace^2 is within 1e-9 of the
// real segment [0, 4].
// ---------------------------------------------------------------------------
struct FixedPoints {
  ProjectivePoint attracting;
  ProjectivePoint repelling;
  cplx multiplier;  // derivative at the attracting fixed point, |q| < 1
};

FixedPoints fixed_points_and_multiplier(const MoebiusMap& m);

// ---------------------------------------------------------------------------
// Round disk on the sphere.  `unbounded_side = false` means the euclidean disk
// { |z - center| <= radius }; `true` means its complement plus infinity.
// ---------------------------------------------------------------------------
struct OrientedDisk {
  cplx center{0.0};
  double radius{1.0};
  bool unbounded_side = false;

  OrientedDisk flipped() const { return {center, radius, !unbounded_side}; }

  // Strict interior test (the boundary circle is outside on both sides).
  bool contains_open(const ProjectivePoint& p) const;

  // Chordal radius of the spherical cap: half the chordal diameter of the
  // boundary circle, measured through the cap.  Shrinks to 0 both for tiny
  // bounded disks and for unbounded-side disks whose circle grows.
  double chordal_radius() const;
};

// Image disk under a Moebius map, computed from the inverse point of the pole
// (exact, not fitted).  Throws ImageIsLine when the pole lies on the boundary
// circle within 1e-12.
OrientedDisk map_disk(const MoebiusMap& m, const OrientedDisk& d);

// Signed chordal gap between two oriented disks: the chordal distance between
// the euclidean nearest boundary points, negative when the disks overlap,
// -2 (maximally invalid) when both contain infinity.
double disk_gap(const OrientedDisk& a, const OrientedDisk& b);

// Closed containment inner ⊆ outer with euclidean slack.
bool disk_contains_disk(const OrientedDisk& outer, const OrientedDisk& inner,
                        double slack);

// ---------------------------------------------------------------------------
// Constructors for generators.
// ---------------------------------------------------------------------------

// The Moebius map sending (p1, p2, p3) to (q1, q2, q3).  Points inside each
// triple must be pairwise distinct.
MoebiusMap moebius_from_three_points(const ProjectivePoint& p1,
                                     const ProjectivePoint& p2,
                                     const ProjectivePoint& p3,
                                     const ProjectivePoint& q1,
                                     const ProjectivePoint& q2,
                                     const ProjectivePoint& q3);

// Canonical pairing map carrying the complement of `src` onto the interior of
// `dst`, with a rotational twist e^{i twist}.  For bounded src this is the
// inversion-type map  z -> c2 + r1 r2 e^{i twist} / (z - c1);  when exactly one
// side flag differs it degenerates to a similarity.  Both-unbounded pairs are
// supported for completeness but can never occur in a valid group.
MoebiusMap pairing_map(const OrientedDisk& src, const OrientedDisk& dst,
                       double twist = 0.0);

}  // namespace schottky
