#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "schottky/complex_geom.hpp"
#include "schottky/errors.hpp"
#include "schottky/group.hpp"

namespace schottky {

// ---------------------------------------------------------------------------
// Shell-structured series output.  Every group sum in this library is
// truncated by reduced word length; shell n collects the words of exactly
// length n, and the total is the compensated sum of shell partials in shell
// order, so results are identical across runs and thread counts.
// ---------------------------------------------------------------------------

enum class Verdict { Converging, Diverging, Inconclusive };

struct ShellSum {
  int word_length = 0;
  double partial = 0.0;
};

struct SeriesEstimate {
  std::vector<ShellSum> shell_sums;
  double total = 0.0;
  // Least-squares slope of log|partial| against word length over the last
  // four shells with nonzero partials; 0 when fewer than two are usable.
  double tail_slope = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

// Computes total/tail_slope/verdict from shell partials (order preserved).
// Converging iff slope < -0.05, Diverging iff slope > +0.05.
SeriesEstimate finalize_estimate(std::vector<ShellSum> shell_sums);

// ---------------------------------------------------------------------------
// Divisors: finite integer-weighted point sets.
// ---------------------------------------------------------------------------

struct DivisorTerm {
  ProjectivePoint point;
  int weight = 0;
};

struct Divisor {
  std::vector<DivisorTerm> terms;
  int degree() const;
};

// Throws std::invalid_argument unless the divisor has pairwise-distinct
// points (spherical distance > 1e-12) and, when required, degree zero.
void check_divisor(const Divisor& d, bool require_degree_zero);

// ---------------------------------------------------------------------------
// The cross-ratio log series  sum_h log|<y, q, h x, h p>|.
// ---------------------------------------------------------------------------

// Shell n partial sums the words of exactly length n; total covers all words
// of length <= max_len.  Throws DegenerateCrossRatio (with the word attached)
// when a term's cross-ratio collapses to 0 or infinity, CapacityExceeded when
// the truncation is over budget.
SeriesEstimate green_series(const SchottkyGroup& group, const ProjectivePoint& y,
                            const ProjectivePoint& q, const ProjectivePoint& x,
                            const ProjectivePoint& p, int max_len, int threads = 1,
                            std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// The group-averaged product  prod_h  w_d(h r) / w_d(h base),  where
// w_d(z) = prod_i (z - point_i)^{weight_i} in homogeneous form.
// ---------------------------------------------------------------------------

struct WProductResult {
  cplx value;               // truncated product
  SeriesEstimate estimate;  // shell sums of log|w_d(h r)/w_d(h base)|
};

// Requires a degree-0 divisor.  Throws PoleHit when an orbit point of r or
// base lands on a divisor point (spherical distance < 1e-12).  For
// d = (y)-(q) the estimate reproduces green_series(y, q, r, base) term by
// term, bit for bit — the bridge between the product and the log series.
WProductResult w_product(const SchottkyGroup& group, const Divisor& d,
                         const ProjectivePoint& base, const ProjectivePoint& r, int max_len,
                         int threads = 1, std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// Logarithmic derivative of the truncated product in the affine chart.
// ---------------------------------------------------------------------------

// Returns  sum_{h, i}  weight_i * d/dz log(h(z) - point_i)  written per term
// as (a v_i - c u_i) / ((a z + b) v_i - (c z + d) u_i) for h = (a,b,c,d) and
// point_i = (u_i : v_i).  Each term drops the divisor-independent piece
// -c/(cz+d), which cancels in every degree-0 sum, so terms stay regular where
// h(z) = infinity and no chart rotation is ever needed.  `base` only pins the
// product normalization and differentiates away; it is accepted for interface
// parity with w_product.  z must be finite.
cplx dlog_w(const SchottkyGroup& group, const Divisor& d, const ProjectivePoint& base,
            const ProjectivePoint& z, int max_len,
            std::uint64_t capacity = kDefaultWordCapacity);

// The l-th basis 1-form:  -i/(2 pi) * dlog_w with divisor (g_l z1) - (z1) and
// base z0.  Its value is independent of z1 up to truncation error.
cplx basis_form(const SchottkyGroup& group, int l, const ProjectivePoint& z1,
                const ProjectivePoint& z0, const ProjectivePoint& z, int max_len,
                std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// Period-coefficient matrix.
//
// entry(k,l) = -i * N_k / D_{kl}  with
//   N_k   = sum over conjugacy-class representatives h of g_k of
//           log|<a, b, z+(h), z-(h)>|,
//   D_kl  = sum over double-coset representatives h of <g_k>\Gamma/<g_l> of
//           log|<z+(g_k), z-(g_k), h z+(g_l), h z-(g_l)>|,
// where the singular k = l identity coset is replaced by log|multiplier(g_k)|
// (counted as the length-0 shell of the diagonal denominator).
// ---------------------------------------------------------------------------

struct XMatrix {
  int rank = 0;
  std::vector<cplx> entries;                         // row-major, entry(k,l)
  std::vector<SeriesEstimate> numerator_estimates;   // row-major, per entry
  std::vector<SeriesEstimate> denominator_estimates; // row-major, per entry

  cplx entry(int k, int l) const;  // 1-based
};

// Shell indices inside the estimates are representative word lengths (sparse).
// Throws SingularDenominator when |D_kl| < 1e-12, DegenerateCrossRatio when
// a or b collides with an enumerated fixed point.  Beware: highly symmetric
// disk systems can make off-diagonal denominators vanish exactly (terms
// cancel in conjugate pairs), in which case this faithfully throws; the
// assembled form below only ever needs the diagonal.
XMatrix x_matrix(const SchottkyGroup& group, const ProjectivePoint& a,
                 const ProjectivePoint& b, int conj_depth, int coset_depth,
                 std::uint64_t capacity = kDefaultWordCapacity);

// The diagonal entries X(l,l) alone — the coefficients the assembled form
// uses.  Never touches off-diagonal denominators, so it stays defined on
// symmetric groups where the full matrix is singular.
std::vector<cplx> x_diagonal(const SchottkyGroup& group, const ProjectivePoint& a,
                             const ProjectivePoint& b, int conj_depth, int coset_depth,
                             std::uint64_t capacity = kDefaultWordCapacity);

// ---------------------------------------------------------------------------
// The assembled form  omega = nu_{(x)-(y)} - sum_l X(l,l) * omega_l,  the
// integrand whose periods the X coefficients drive to the imaginary axis.
// ---------------------------------------------------------------------------

struct AssembleParams {
  int max_len = 6;
  int conj_depth = 4;
  int coset_depth = 4;
  ProjectivePoint z0;  // product base point
  ProjectivePoint z1;  // basis-divisor point, in the fundamental domain
  std::uint64_t capacity = kDefaultWordCapacity;
};

// Reusable evaluator: words and X coefficients are computed once, so repeated
// evaluation (contour quadrature) costs one pass over the cached word table
// per call.
class AssembledForm {
 public:
  cplx operator()(const cplx& z) const;
  cplx operator()(const ProjectivePoint& z) const;

  // The diagonal coefficients X(l,l) entering the correction sum.
  const std::vector<cplx>& coefficients() const { return x_diag_; }
  const SchottkyGroup& group() const { return group_; }

 private:
  friend AssembledForm make_assembled_form(const SchottkyGroup&, const ProjectivePoint&,
                                           const ProjectivePoint&, const AssembleParams&);
  explicit AssembledForm(SchottkyGroup g) : group_(std::move(g)) {}

  SchottkyGroup group_;
  std::shared_ptr<const std::vector<MoebiusMap>> words_;  // canonical order
  std::vector<DivisorTerm> nu_terms_;                     // (x) - (y), normalized
  std::vector<std::vector<DivisorTerm>> basis_terms_;     // (g_l z1) - (z1) per l
  std::vector<cplx> x_diag_;                              // X(l,l)
  std::vector<cplx> coeff_;                               // X(l,l) * (-i / 2 pi)
};

AssembledForm make_assembled_form(const SchottkyGroup& group, const ProjectivePoint& x,
                                  const ProjectivePoint& y, const AssembleParams& params);

// One-shot evaluation of the assembled form at z.
cplx assemble_omega(const SchottkyGroup& group, const ProjectivePoint& x,
                    const ProjectivePoint& y, const ProjectivePoint& z,
                    const AssembleParams& params);

// ---------------------------------------------------------------------------
// Contour periods and the critical-exponent estimator.
// ---------------------------------------------------------------------------

// Trapezoidal quadrature of `form` (the coefficient function of f(z) dz)
// counterclockwise along the boundary circle of D_k, with n_quad nodes
// (even, >= 4).  Throws QuadratureUnstable when halving the node count moves
// the result by more than 1e-3.
cplx period_integral(const SchottkyGroup& group, const std::function<cplx(const cplx&)>& form,
                     int k, int n_quad);

struct DeltaEstimate {
  double delta_hat = 0.0;
  bool below_range = false;  // shell ratio already < 1 at s = 0; reported as 0
  bool above_range = false;  // shell ratio still > 1 at s = 2; reported as 2
};

// Bisection root of the shell-growth ratio of the derivative sums
// P_n(s) = sum_{|w|=n} |w'(z0)|^s  (spherical derivative), with the ratio
// geometrically averaged over the last three shell steps.  Requires
// max_len >= 6.  delta_hat is clamped to [0, 2] with range flags.
DeltaEstimate estimate_delta(const SchottkyGroup& group, const ProjectivePoint& z0,
                             int max_len, int threads = 1,
                             std::uint64_t capacity = kDefaultWordCapacity);

namespace detail {

// One series term for the word matrix m: the cross-ratio <y, q, m x, m p> as
// determinant products plus its log-magnitude.  y, q, x, p must be normalized.
// The guard throws with the word attached when the term degenerates.
struct GreenTerm {
  ProjectivePoint hx, hp;
  cplx num, den;
  double log_abs;
};

inline GreenTerm green_term(const ProjectivePoint& y, const ProjectivePoint& q,
                            const MoebiusMap& m, const ProjectivePoint& x,
                            const ProjectivePoint& p,
                            const std::vector<std::int32_t>& letters) {
  GreenTerm t;
  t.hx = m(x);
  t.hp = m(p);
  t.num = det2(y, t.hx) * det2(q, t.hp);
  t.den = det2(y, t.hp) * det2(q, t.hx);
  if (std::abs(t.num) < 1e-300 || std::abs(t.den) < 1e-300)
    throw DegenerateCrossRatio("series term <y,q,hx,hp> degenerated to 0 or infinity",
                               letters);
  t.log_abs = std::log(std::abs(t.num / t.den));
  return t;
}

}  // namespace detail

}  // namespace schottky
