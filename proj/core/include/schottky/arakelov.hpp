#pragma once

#include <cstdint>
#include <vector>

#include "schottky/complex_geom.hpp"
#include "schottky/errors.hpp"
#include "schottky/group.hpp"
#include "schottky/series.hpp"

namespace schottky {

// ---------------------------------------------------------------------------
// Height pairing between degree-0 divisors with disjoint supports.
//
// Slot convention, used everywhere in this library:
//   g((x)-(y), (p)-(q))  :=  green_series(x, y, p, q).total.
// A general pair (a, b) is expanded by prefix weights into consecutive
// point differences: with a = sum_i m_i (P_i) and e_i = m_1 + ... + m_i,
//   a = sum_i e_i [(P_i) - (P_{i+1})]   (the e = 0 terms are dropped),
// and likewise for b, so the pairing is bilinear by construction.
// ---------------------------------------------------------------------------

struct PairingTerm {
  ProjectivePoint a_plus, a_minus;  // the (P_i) - (P_{i+1}) difference from a
  ProjectivePoint b_plus, b_minus;  // the (Q_j) - (Q_{j+1}) difference from b
  int weight = 0;                   // e_i * f_j
  SeriesEstimate estimate;          // green_series(a_plus, a_minus, b_plus, b_minus)
};

struct PairingReport {
  double value = 0.0;  // compensated sum of weight * estimate.total, term order
  std::vector<PairingTerm> terms;
  int max_len = 0;
};

// Throws OverlappingSupports when a point of `a` sits within spherical
// distance 1e-12 of a point of `b`; series errors propagate.  When a and b
// are single differences the value equals the series total bit for bit.
PairingReport height_pairing(const SchottkyGroup& group, const Divisor& a, const Divisor& b,
                             int max_len, int threads = 1,
                             std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// Monte Carlo double integral of the series over the fundamental domain.
// ---------------------------------------------------------------------------

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
  int n_samples = 0;
  std::uint64_t seed = 0;
};

// Draws n points from the spherical (Fubini-Study) area measure restricted to
// the closed fundamental domain — the complement of all open disks — by
// rejection.  Counter-based streams keyed by the proposal index make the
// output a pure function of (group, n, seed).  Throws RejectionStarvation
// when the cumulative acceptance rate drops below 1% at a multiple of 10^4
// proposals.
std::vector<ProjectivePoint> sample_fundamental_domain(const SchottkyGroup& group, int n,
                                                       std::uint64_t seed);

// Mean and standard error of green_series(y, q_i, x, p_i).total over i.i.d.
// fundamental-domain sample pairs (p_i, q_i).  x and y must be distinct
// points of the fundamental domain; n_samples >= 2.  Same seed, same result,
// bit for bit (means are compensated sums in sample-index order).
MonteCarloEstimate green_double_integral(const SchottkyGroup& group, const ProjectivePoint& x,
                                         const ProjectivePoint& y, int n_samples,
                                         std::uint64_t seed, int max_len, int threads = 1,
                                         std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// Independent rank-1 oracle.
// ---------------------------------------------------------------------------

// Bilateral sum  sum_{n in Z} log| (y - m^n x)(q - m^n p) / ((y - m^n p)(q - m^n x)) |
// for the cyclic group generated by z -> multiplier * z, in plain affine
// arithmetic (deliberately sharing no code with the series engine).  The
// cutoff N comes from a conservative geometric tail bound driven down to
// tol/4, never below 8; the sum is then re-run at cutoff 2N and the two
// values must agree within tol, else ToleranceUnreachable (also thrown
// immediately when |multiplier| > 0.99).  Points must be finite, nonzero,
// and pairwise distinct; 0 < |multiplier| < 1.
double cyclic_oracle(const cplx& multiplier, const ProjectivePoint& y,
                     const ProjectivePoint& q_pt, const ProjectivePoint& x,
                     const ProjectivePoint& p, double tol);

}  // namespace schottky
