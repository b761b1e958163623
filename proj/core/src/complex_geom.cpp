#include "schottky/complex_geom.hpp"

#include <cmath>
#include <limits>

namespace schottky {

namespace {
constexpr double kDegenerateFloor = 1e-300;
constexpr double kLineTol = 1e-12;
constexpr double kLoxodromicTol = 1e-9;
}  // namespace

double ProjectivePoint::coord_norm() const {
  return std::hypot(std::abs(u), std::abs(v));
}

ProjectivePoint ProjectivePoint::normalized() const {
  const double n = coord_norm();
  if (n == 0.0 || !std::isfinite(n))
    throw std::invalid_argument("projective point has no finite nonzero representative");
  return {u / n, v / n};
}

cplx ProjectivePoint::to_complex() const {
  if (is_infinite()) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return u / v;
}

cplx det2(const ProjectivePoint& p, const ProjectivePoint& q) {
  return p.u * q.v - q.u * p.v;
}

double chordal(const ProjectivePoint& p, const ProjectivePoint& q) {
  return 2.0 * std::abs(det2(p, q)) / (p.coord_norm() * q.coord_norm());
}

bool approx_equal(const ProjectivePoint& p, const ProjectivePoint& q, double tol) {
  return chordal(p, q) <= tol;
}

MoebiusMap MoebiusMap::normalized() const {
  const cplx dt = det();
  if (std::abs(dt) < kDegenerateFloor)
    throw std::invalid_argument("matrix is singular, not a Moebius map");
  const cplx s = std::sqrt(dt);  // principal root: Re >= 0, Im > 0 on the cut
  return {a / s, b / s, c / s, d / s};
}

ProjectivePoint cross_ratio(const ProjectivePoint& a, const ProjectivePoint& b,
                            const ProjectivePoint& c, const ProjectivePoint& d) {
  const cplx num = det2(a, c) * det2(b, d);
  const cplx den = det2(a, d) * det2(b, c);
  if (std::abs(num) < kDegenerateFloor && std::abs(den) < kDegenerateFloor)
    throw DegenerateCrossRatio("cross-ratio 0/0: quadruple is degenerate");
  return ProjectivePoint{num, den}.normalized();
}

cplx cross_ratio_value(const ProjectivePoint& a, const ProjectivePoint& b,
                       const ProjectivePoint& c, const ProjectivePoint& d) {
  return cross_ratio(a, b, c, d).to_complex();
}

namespace {

// Kernel vector of (m - lambda I): either (b, lambda - a) or (lambda - d, c);
// take the one with the larger norm so diagonal matrices stay well-posed.
ProjectivePoint eigenvector(const MoebiusMap& m, cplx lambda) {
  const ProjectivePoint cand1{m.b, lambda - m.a};
  const ProjectivePoint cand2{lambda - m.d, m.c};
  return (cand1.coord_norm() >= cand2.coord_norm() ? cand1 : cand2).normalized();
}

}  // namespace

FixedPoints fixed_points_and_multiplier(const MoebiusMap& m_in) {
  const MoebiusMap m = m_in.normalized();
  const cplx tr = m.trace();
  const cplx tr2 = tr * tr;

  // distance of trace^2 to the real segment [0, 4]
  const double re = tr2.real(), im = tr2.imag();
  const double dx = re < 0.0 ? -re : (re > 4.0 ? re - 4.0 : 0.0);
  if (std::hypot(dx, im) < kLoxodromicTol)
    throw NotLoxodromic("trace^2 lies on [0,4]: map is not loxodromic");

  const cplx s = std::sqrt(tr2 - 4.0);
  cplx lam_big = 0.5 * (tr + s);
  cplx lam_small = 0.5 * (tr - s);
  if (std::abs(lam_big) < std::abs(lam_small)) std::swap(lam_big, lam_small);

  // The attracting fixed point is the eigenvector of the larger eigenvalue
  // (conjugate to z -> q z with q = lam_small / lam_big, |q| < 1).
  FixedPoints fp;
  fp.attracting = eigenvector(m, lam_big);
  fp.repelling = eigenvector(m, lam_small);
  fp.multiplier = lam_small / lam_big;
  return fp;
}

bool OrientedDisk::contains_open(const ProjectivePoint& p) const {
  if (p.is_infinite()) return unbounded_side;
  const double dist = std::abs(p.to_complex() - center);
  return unbounded_side ? dist > radius : dist < radius;
}

double OrientedDisk::chordal_radius() const {
  // Extremal boundary points on the line through the origin: by symmetry they
  // are diametrically opposite on the lifted circle, so half their chordal
  // distance is the cap radius.
  const double ac = std::abs(center);
  const cplx dir = ac == 0.0 ? cplx(1.0) : center / ac;
  const ProjectivePoint p1 = ProjectivePoint::from_complex(center + radius * dir);
  const ProjectivePoint p2 = ProjectivePoint::from_complex(center - radius * dir);
  return 0.5 * chordal(p1, p2);
}

OrientedDisk map_disk(const MoebiusMap& m_in, const OrientedDisk& d) {
  const MoebiusMap m = m_in.normalized();
  const cplx c0 = d.center;
  const double r = d.radius;

  cplx image_center;
  double image_radius;
  if (m.c == cplx(0.0)) {
    // Affine map z -> (a/d) z + b/d.
    const cplx s = m.a / m.d;
    image_center = s * c0 + m.b / m.d;
    image_radius = std::abs(s) * r;
  } else {
    const cplx pole = -m.d / m.c;
    const cplx e = pole - c0;
    const double ae = std::abs(e);
    if (std::abs(ae - r) < kLineTol)
      throw ImageIsLine("pole lies on the boundary circle: image is a line");
    if (ae == 0.0) {
      // Pole at the center: its inverse point is infinity, whose image is a/c.
      image_center = m.a / m.c;
      image_radius = std::abs(m.apply_affine(c0 + r) - image_center);
    } else {
      // The image circle's center is the image of the point inverse to the
      // pole with respect to the source circle.
      const cplx inv_pt = c0 + (r * r) / std::conj(e);
      image_center = m.apply_affine(inv_pt);
      const cplx far_boundary = c0 - (r / ae) * e;  // boundary farthest from pole
      image_radius = std::abs(m.apply_affine(far_boundary) - image_center);
    }
  }

  // Side flag: track where an interior sample of d lands.
  const ProjectivePoint sample =
      d.unbounded_side ? ProjectivePoint::infinity() : ProjectivePoint::from_complex(c0);
  const ProjectivePoint image_sample = m(sample);
  bool unbounded;
  if (image_sample.is_infinite())
    unbounded = true;
  else
    unbounded = std::abs(image_sample.to_complex() - image_center) > image_radius;
  return {image_center, image_radius, unbounded};
}

double disk_gap(const OrientedDisk& a, const OrientedDisk& b) {
  if (a.unbounded_side && b.unbounded_side) return -2.0;  // both contain infinity

  if (!a.unbounded_side && !b.unbounded_side) {
    const cplx delta = b.center - a.center;
    const double dist = std::abs(delta);
    const double gap_e = dist - a.radius - b.radius;
    const cplx u = dist == 0.0 ? cplx(1.0) : delta / dist;
    const auto p1 = ProjectivePoint::from_complex(a.center + a.radius * u);
    const auto p2 = ProjectivePoint::from_complex(b.center - b.radius * u);
    const double ch = chordal(p1, p2);
    return gap_e >= 0.0 ? ch : -ch;
  }

  // One side is a complement disk: the bounded one must sit strictly inside
  // the round circle of the unbounded one.
  const OrientedDisk& outer = a.unbounded_side ? a : b;
  const OrientedDisk& inner = a.unbounded_side ? b : a;
  const cplx delta = inner.center - outer.center;
  const double dist = std::abs(delta);
  const double gap_e = outer.radius - (dist + inner.radius);
  const cplx u = dist == 0.0 ? cplx(1.0) : delta / dist;
  const auto p1 = ProjectivePoint::from_complex(inner.center + inner.radius * u);
  const auto p2 = ProjectivePoint::from_complex(outer.center + outer.radius * u);
  const double ch = chordal(p1, p2);
  return gap_e >= 0.0 ? ch : -ch;
}

bool disk_contains_disk(const OrientedDisk& outer, const OrientedDisk& inner,
                        double slack) {
  const double dist = std::abs(inner.center - outer.center);
  if (!outer.unbounded_side && !inner.unbounded_side)
    return dist + inner.radius <= outer.radius + slack;
  if (outer.unbounded_side && !inner.unbounded_side)
    return dist - inner.radius >= outer.radius - slack;
  if (outer.unbounded_side && inner.unbounded_side)
    return dist + outer.radius <= inner.radius + slack;
  return false;  // an unbounded-side disk cannot sit inside a bounded one
}

namespace {

// Matrix sending (p1, p2, p3) to (0, 1, infinity):
//   S z = ( det(z, p1) det(p2, p3) : det(z, p3) det(p2, p1) ).
MoebiusMap to_zero_one_inf(const ProjectivePoint& p1, const ProjectivePoint& p2,
                           const ProjectivePoint& p3) {
  const cplx A = det2(p2, p3);
  const cplx B = det2(p2, p1);
  return {A * p1.v, -A * p1.u, B * p3.v, -B * p3.u};
}

}  // namespace

MoebiusMap moebius_from_three_points(const ProjectivePoint& p1,
                                     const ProjectivePoint& p2,
                                     const ProjectivePoint& p3,
                                     const ProjectivePoint& q1,
                                     const ProjectivePoint& q2,
                                     const ProjectivePoint& q3) {
  const MoebiusMap s = to_zero_one_inf(p1.normalized(), p2.normalized(), p3.normalized());
  const MoebiusMap t = to_zero_one_inf(q1.normalized(), q2.normalized(), q3.normalized());
  const MoebiusMap m = t.inverse() * s;  // adjugate works projectively
  if (std::abs(m.det()) < 1e-30)
    throw std::invalid_argument("three-point data is degenerate (coincident points)");
  return m.normalized();
}

MoebiusMap pairing_map(const OrientedDisk& src, const OrientedDisk& dst,
                       double twist) {
  const cplx phase = std::polar(1.0, twist);
  // The complement of src and the interior of dst each sit either inside or
  // outside their circle; a similarity matches like sides, an inversion-type
  // map swaps them.
  const bool complement_is_exterior = !src.unbounded_side;
  const bool interior_is_exterior = dst.unbounded_side;
  if (complement_is_exterior == interior_is_exterior) {
    const cplx s = (dst.radius / src.radius) * phase;
    return MoebiusMap{s, dst.center - s * src.center, cplx(0.0), cplx(1.0)}.normalized();
  }
  const cplx k = src.radius * dst.radius * phase;
  return MoebiusMap{dst.center, k - src.center * dst.center, cplx(1.0), -src.center}
      .normalized();
}

}  // namespace schottky
