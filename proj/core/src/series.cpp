#include "schottky/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "schottky/detail/shell_reduce.hpp"
#include "schottky/summation.hpp"

namespace schottky {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SeriesEstimate finalize_estimate(std::vector<ShellSum> shell_sums) {
  SeriesEstimate est;
  est.shell_sums = std::move(shell_sums);

  NeumaierSum acc;
  for (const ShellSum& s : est.shell_sums) acc.add(s.partial);
  est.total = acc.value();

  // Tail behaviour: least-squares fit of log|partial| against word length over
  // the last four shells whose partials are nonzero (zero shells carry no
  // magnitude information).
  std::vector<std::pair<double, double>> pts;
  for (auto it = est.shell_sums.rbegin(); it != est.shell_sums.rend() && pts.size() < 4; ++it)
    if (it->partial != 0.0 && std::isfinite(it->partial))
      pts.emplace_back(static_cast<double>(it->word_length), std::log(std::abs(it->partial)));

  if (pts.size() < 2) {
    est.tail_slope = 0.0;
    est.verdict = Verdict::Inconclusive;
    return est;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [px, py] : pts) {
    sx += px;
    sy += py;
    sxx += px * px;
    sxy += px * py;
  }
  const double n = static_cast<double>(pts.size());
  est.tail_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  est.verdict = est.tail_slope < -0.05   ? Verdict::Converging
                : est.tail_slope > 0.05 ? Verdict::Diverging
                                        : Verdict::Inconclusive;
  return est;
}

int Divisor::degree() const {
  int sum = 0;
  for (const DivisorTerm& t : terms) sum += t.weight;
  return sum;
}

void check_divisor(const Divisor& d, bool require_degree_zero) {
  if (d.terms.empty()) throw std::invalid_argument("divisor must be nonempty");
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    if (d.terms[i].weight == 0) throw std::invalid_argument("divisor weights must be nonzero");
    for (std::size_t j = i + 1; j < d.terms.size(); ++j)
      if (chordal(d.terms[i].point, d.terms[j].point) <= 1e-12)
        throw std::invalid_argument("divisor points must be pairwise distinct");
  }
  if (require_degree_zero && d.degree() != 0)
    throw std::invalid_argument("divisor must have degree zero");
}

SeriesEstimate green_series(const SchottkyGroup& group, const ProjectivePoint& y,
                            const ProjectivePoint& q, const ProjectivePoint& x,
                            const ProjectivePoint& p, int max_len, int threads,
                            std::uint64_t capacity) {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  require_word_capacity(group.rank(), max_len, capacity);
  const ProjectivePoint yn = y.normalized(), qn = q.normalized();
  const ProjectivePoint xn = x.normalized(), pn = p.normalized();
  if (approx_equal(yn, qn) || approx_equal(xn, pn))
    throw std::invalid_argument("series needs y distinct from q and x distinct from p");

  auto partials = detail::shell_map<double>(max_len + 1, threads, [&](int shell) {
    NeumaierSum acc;
    for_each_word_of_length(group, shell,
                            [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
                              acc.add(detail::green_term(yn, qn, m, xn, pn, letters).log_abs);
                            });
    return acc.value();
  });

  std::vector<ShellSum> shells(partials.size());
  for (std::size_t i = 0; i < partials.size(); ++i)
    shells[i] = {static_cast<int>(i), partials[i]};
  return finalize_estimate(std::move(shells));
}

namespace {

struct ShellProduct {
  cplx product{1.0, 0.0};
  double log_partial = 0.0;
};

// Multiplies f into acc, skipping the initial 1*f so the accumulated value is
// a pure chain of pairwise products (this is what makes the d = (y)-(q) case
// reproduce the green series terms bit for bit).
void chain_mul(cplx& acc, bool& started, const cplx& f) {
  if (started) {
    acc *= f;
  } else {
    acc = f;
    started = true;
  }
}

}  // namespace

WProductResult w_product(const SchottkyGroup& group, const Divisor& d,
                         const ProjectivePoint& base, const ProjectivePoint& r, int max_len,
                         int threads, std::uint64_t capacity) {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  check_divisor(d, true);
  require_word_capacity(group.rank(), max_len, capacity);

  std::vector<DivisorTerm> terms;
  terms.reserve(d.terms.size());
  for (const DivisorTerm& t : d.terms) terms.push_back({t.point.normalized(), t.weight});
  const ProjectivePoint rn = r.normalized(), basen = base.normalized();

  auto per_shell = detail::shell_map<ShellProduct>(max_len + 1, threads, [&](int shell) {
    ShellProduct out;
    bool value_started = false;
    NeumaierSum logs;
    for_each_word_of_length(
        group, shell, [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
          const ProjectivePoint hr = m(rn);
          const ProjectivePoint hb = m(basen);
          for (const DivisorTerm& t : terms) {
            if (2.0 * std::abs(det2(hr, t.point)) < 1e-12 ||
                2.0 * std::abs(det2(hb, t.point)) < 1e-12)
              throw PoleHit("an orbit point of r or base hit a divisor point", letters);
          }
          cplx num{}, den{};
          bool num_started = false, den_started = false;
          for (const DivisorTerm& t : terms) {
            const cplx f = det2(hr, t.point);
            const int reps = t.weight > 0 ? t.weight : -t.weight;
            for (int i = 0; i < reps; ++i)
              chain_mul(t.weight > 0 ? num : den, t.weight > 0 ? num_started : den_started, f);
          }
          for (const DivisorTerm& t : terms) {
            const cplx f = det2(hb, t.point);
            const int reps = t.weight > 0 ? t.weight : -t.weight;
            for (int i = 0; i < reps; ++i)
              chain_mul(t.weight > 0 ? den : num, t.weight > 0 ? den_started : num_started, f);
          }
          const cplx term = num / den;  // degree 0: both sides nonempty
          chain_mul(out.product, value_started, term);
          logs.add(std::log(std::abs(term)));
        });
    if (!value_started) out.product = cplx{1.0, 0.0};  // empty shell cannot occur, identity anyway
    out.log_partial = logs.value();
    return out;
  });

  WProductResult result;
  result.value = cplx{1.0, 0.0};
  bool started = false;
  std::vector<ShellSum> shells(per_shell.size());
  for (std::size_t i = 0; i < per_shell.size(); ++i) {
    chain_mul(result.value, started, per_shell[i].product);
    shells[i] = {static_cast<int>(i), per_shell[i].log_partial};
  }
  result.estimate = finalize_estimate(std::move(shells));
  return result;
}

namespace {

// Per-word contribution to the logarithmic derivative at finite z:
//   sum_i weight_i * (a v_i - c u_i) / ((a z + b) v_i - (c z + d) u_i).
// The divisor-independent piece -c/(cz+d) of each naive term cancels in every
// degree-0 sum and is dropped, which keeps terms finite where h(z) = infinity.
void dlog_accumulate(const MoebiusMap& m, const std::vector<DivisorTerm>& terms, const cplx& z,
                     NeumaierSumC& acc, const std::vector<std::int32_t>* letters) {
  const cplx az_b = m.a * z + m.b;
  const cplx cz_d = m.c * z + m.d;
  const double scale = std::hypot(std::abs(az_b), std::abs(cz_d));
  for (const DivisorTerm& t : terms) {
    const cplx den = az_b * t.point.v - cz_d * t.point.u;
    if (std::abs(den) < 1e-12 * scale)
      throw PoleHit("derivative evaluated on top of an orbit zero/pole",
                    letters ? *letters : std::vector<std::int32_t>{});
    acc.add(static_cast<double>(t.weight) * ((m.a * t.point.v - m.c * t.point.u) / den));
  }
}

std::vector<DivisorTerm> normalized_terms(const Divisor& d) {
  std::vector<DivisorTerm> terms;
  terms.reserve(d.terms.size());
  for (const DivisorTerm& t : d.terms) terms.push_back({t.point.normalized(), t.weight});
  return terms;
}

}  // namespace

cplx dlog_w(const SchottkyGroup& group, const Divisor& d, const ProjectivePoint& base,
            const ProjectivePoint& z, int max_len, std::uint64_t capacity) {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  check_divisor(d, true);
  if (z.is_infinite())
    throw std::invalid_argument("derivative evaluation point must be finite");
  (void)base;  // the base factor of the product is constant in z
  require_word_capacity(group.rank(), max_len, capacity);

  const std::vector<DivisorTerm> terms = normalized_terms(d);
  const cplx zc = z.to_complex();
  NeumaierSumC acc;
  for_each_word(group, max_len,
                [&](const std::vector<std::int32_t>& letters, const MoebiusMap& m) {
                  dlog_accumulate(m, terms, zc, acc, &letters);
                });
  return acc.value();
}

cplx basis_form(const SchottkyGroup& group, int l, const ProjectivePoint& z1,
                const ProjectivePoint& z0, const ProjectivePoint& z, int max_len,
                std::uint64_t capacity) {
  if (l < 1 || l > group.rank()) throw std::invalid_argument("generator index out of range");
  const ProjectivePoint z1n = z1.normalized();
  const Divisor d{{{group.generator(l)(z1n), +1}, {z1n, -1}}};
  return (cplx(0.0, -1.0) / (2.0 * kPi)) * dlog_w(group, d, z0, z, max_len, capacity);
}

namespace {

double cross_log(const ProjectivePoint& a, const ProjectivePoint& b, const ProjectivePoint& c,
                 const ProjectivePoint& d, const std::vector<std::int32_t>& letters) {
  const cplx num = det2(a, c) * det2(b, d);
  const cplx den = det2(a, d) * det2(b, c);
  if (std::abs(num) < 1e-300 || std::abs(den) < 1e-300)
    throw DegenerateCrossRatio("coefficient term degenerated to 0 or infinity", letters);
  return std::log(std::abs(num / den));
}

SeriesEstimate estimate_from_buckets(const std::map<int, NeumaierSum>& buckets) {
  std::vector<ShellSum> shells;
  shells.reserve(buckets.size());
  for (const auto& [length, acc] : buckets) shells.push_back({length, acc.value()});
  return finalize_estimate(std::move(shells));
}

}  // namespace

cplx XMatrix::entry(int k, int l) const {
  if (k < 1 || k > rank || l < 1 || l > rank)
    throw std::invalid_argument("matrix index out of range");
  return entries[static_cast<std::size_t>(k - 1) * rank + (l - 1)];
}

namespace {

std::vector<FixedPoints> generator_fixed_points(const SchottkyGroup& group) {
  std::vector<FixedPoints> fp;
  fp.reserve(group.rank());
  for (int k = 1; k <= group.rank(); ++k)
    fp.push_back(fixed_points_and_multiplier(group.generator(k)));
  return fp;
}

// Row numerator: sum of log|<a,b,z+(h),z-(h)>| over distinct conjugates of
// g_k, bucketed by representative word length.  The conjugate's fixed points
// are the conjugator images of the generator's, which stays stable at depths
// where eigen-extraction from the multiplied-out conjugate would cancel away.
SeriesEstimate x_numerator(const SchottkyGroup& group, const ProjectivePoint& an,
                           const ProjectivePoint& bn, const FixedPoints& fpk, int k,
                           int conj_depth, std::uint64_t capacity) {
  std::map<int, NeumaierSum> buckets;
  for (const ConjugacyRep& e : conjugacy_class_reps(group, k, conj_depth, capacity)) {
    const ProjectivePoint zp = e.conjugator_matrix(fpk.attracting);
    const ProjectivePoint zm = e.conjugator_matrix(fpk.repelling);
    buckets[e.word.length()].add(cross_log(an, bn, zp, zm, e.word.letters));
  }
  return estimate_from_buckets(buckets);
}

SeriesEstimate x_denominator(const SchottkyGroup& group, const std::vector<FixedPoints>& fp,
                             int k, int l, int coset_depth, std::uint64_t capacity) {
  std::map<int, NeumaierSum> buckets;
  // The excluded k = l identity coset contributes the multiplier instead.
  if (k == l) buckets[0].add(std::log(std::abs(fp[k - 1].multiplier)));
  for (const WordEntry& e : double_coset_reps(group, k, l, coset_depth, capacity)) {
    const ProjectivePoint hzp = e.matrix(fp[l - 1].attracting);
    const ProjectivePoint hzm = e.matrix(fp[l - 1].repelling);
    buckets[e.word.length()].add(
        cross_log(fp[k - 1].attracting, fp[k - 1].repelling, hzp, hzm, e.word.letters));
  }
  return estimate_from_buckets(buckets);
}

void check_x_inputs(const ProjectivePoint& an, const ProjectivePoint& bn, int conj_depth,
                    int coset_depth) {
  if (conj_depth < 0 || coset_depth < 0)
    throw std::invalid_argument("depths must be nonnegative");
  if (approx_equal(an, bn)) throw std::invalid_argument("a and b must be distinct");
}

}  // namespace

XMatrix x_matrix(const SchottkyGroup& group, const ProjectivePoint& a,
                 const ProjectivePoint& b, int conj_depth, int coset_depth,
                 std::uint64_t capacity) {
  const ProjectivePoint an = a.normalized(), bn = b.normalized();
  check_x_inputs(an, bn, conj_depth, coset_depth);
  const int g = group.rank();
  const std::vector<FixedPoints> fp = generator_fixed_points(group);

  std::vector<SeriesEstimate> nums;
  nums.reserve(g);
  for (int k = 1; k <= g; ++k)
    nums.push_back(x_numerator(group, an, bn, fp[k - 1], k, conj_depth, capacity));

  XMatrix X;
  X.rank = g;
  X.entries.resize(static_cast<std::size_t>(g) * g);
  X.numerator_estimates.resize(X.entries.size());
  X.denominator_estimates.resize(X.entries.size());

  for (int k = 1; k <= g; ++k) {
    for (int l = 1; l <= g; ++l) {
      SeriesEstimate den = x_denominator(group, fp, k, l, coset_depth, capacity);
      if (std::abs(den.total) < 1e-12)
        throw SingularDenominator("coefficient denominator sum is numerically zero");
      const std::size_t idx = static_cast<std::size_t>(k - 1) * g + (l - 1);
      X.entries[idx] = cplx(0.0, -nums[k - 1].total / den.total);
      X.numerator_estimates[idx] = nums[k - 1];
      X.denominator_estimates[idx] = std::move(den);
    }
  }
  return X;
}

std::vector<cplx> x_diagonal(const SchottkyGroup& group, const ProjectivePoint& a,
                             const ProjectivePoint& b, int conj_depth, int coset_depth,
                             std::uint64_t capacity) {
  const ProjectivePoint an = a.normalized(), bn = b.normalized();
  check_x_inputs(an, bn, conj_depth, coset_depth);
  const std::vector<FixedPoints> fp = generator_fixed_points(group);

  std::vector<cplx> diag;
  diag.reserve(group.rank());
  for (int l = 1; l <= group.rank(); ++l) {
    const SeriesEstimate num = x_numerator(group, an, bn, fp[l - 1], l, conj_depth, capacity);
    const SeriesEstimate den = x_denominator(group, fp, l, l, coset_depth, capacity);
    if (std::abs(den.total) < 1e-12)
      throw SingularDenominator("coefficient denominator sum is numerically zero");
    diag.push_back(cplx(0.0, -num.total / den.total));
  }
  return diag;
}

AssembledForm make_assembled_form(const SchottkyGroup& group, const ProjectivePoint& x,
                                  const ProjectivePoint& y, const AssembleParams& params) {
  if (params.max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  require_word_capacity(group.rank(), params.max_len, params.capacity);

  AssembledForm form(group);
  const Divisor nu{{{x, +1}, {y, -1}}};
  check_divisor(nu, true);
  form.nu_terms_ = normalized_terms(nu);

  const ProjectivePoint z1n = params.z1.normalized();
  form.basis_terms_.reserve(group.rank());
  for (int l = 1; l <= group.rank(); ++l) {
    const Divisor dl{{{group.generator(l)(z1n), +1}, {z1n, -1}}};
    check_divisor(dl, true);
    form.basis_terms_.push_back(normalized_terms(dl));
  }

  auto words = std::make_shared<std::vector<MoebiusMap>>();
  words->reserve(static_cast<std::size_t>(reduced_word_count(group.rank(), params.max_len)));
  for_each_word(group, params.max_len,
                [&](const std::vector<std::int32_t>&, const MoebiusMap& m) {
                  words->push_back(m);
                });
  form.words_ = std::move(words);

  form.x_diag_ = x_diagonal(group, x, y, params.conj_depth, params.coset_depth, params.capacity);
  form.coeff_.reserve(group.rank());
  for (const cplx& xl : form.x_diag_)
    form.coeff_.push_back(xl * (cplx(0.0, -1.0) / (2.0 * kPi)));
  return form;
}

cplx AssembledForm::operator()(const cplx& z) const {
  NeumaierSumC nu;
  for (const MoebiusMap& m : *words_) dlog_accumulate(m, nu_terms_, z, nu, nullptr);
  cplx result = nu.value();
  for (std::size_t l = 0; l < basis_terms_.size(); ++l) {
    NeumaierSumC wl;
    for (const MoebiusMap& m : *words_) dlog_accumulate(m, basis_terms_[l], z, wl, nullptr);
    result -= coeff_[l] * wl.value();
  }
  return result;
}

cplx AssembledForm::operator()(const ProjectivePoint& z) const {
  if (z.is_infinite())
    throw std::invalid_argument("derivative evaluation point must be finite");
  return (*this)(z.to_complex());
}

cplx assemble_omega(const SchottkyGroup& group, const ProjectivePoint& x,
                    const ProjectivePoint& y, const ProjectivePoint& z,
                    const AssembleParams& params) {
  return make_assembled_form(group, x, y, params)(z);
}

cplx period_integral(const SchottkyGroup& group, const std::function<cplx(const cplx&)>& form,
                     int k, int n_quad) {
  if (k < 1 || k > group.rank()) throw std::invalid_argument("disk index out of range");
  if (n_quad < 4 || n_quad % 2 != 0)
    throw std::invalid_argument("node count must be even and at least 4");
  const OrientedDisk& disk = group.disks()[2 * static_cast<std::size_t>(k - 1)];

  // Trapezoid rule on a periodic integrand; the half-resolution sum reuses the
  // even-indexed nodes, so the stability test costs no extra evaluations.
  NeumaierSumC full, half;
  for (int j = 0; j < n_quad; ++j) {
    const double theta = (2.0 * kPi * j) / n_quad;
    const cplx e = std::polar(1.0, theta);
    const cplx node = disk.center + disk.radius * e;
    const cplx val = form(node) * (cplx(0.0, 1.0) * disk.radius * e);
    full.add(val);
    if (j % 2 == 0) half.add(val);
  }
  const cplx coarse = half.value() * (2.0 * kPi / (n_quad / 2));
  const cplx fine = full.value() * (2.0 * kPi / n_quad);
  if (std::abs(fine - coarse) > 1e-3) {
    std::ostringstream os;
    os << "contour quadrature did not settle: node doubling moved the result by "
       << std::abs(fine - coarse);
    throw QuadratureUnstable(os.str());
  }
  return fine;
}

DeltaEstimate estimate_delta(const SchottkyGroup& group, const ProjectivePoint& z0,
                             int max_len, int threads, std::uint64_t capacity) {
  if (max_len < 6)
    throw std::invalid_argument("exponent estimation needs at least six shells");
  require_word_capacity(group.rank(), max_len, capacity);
  const ProjectivePoint zn = z0.normalized();

  // Squared homogeneous norms t_w = |M_w z0|^2 for the last four shells; the
  // spherical derivative of a det-1 map is 1/t_w, so P_n(s) = sum t_w^{-s}.
  auto t_arrays = detail::shell_map<std::vector<double>>(4, threads, [&](int i) {
    const int shell = max_len - 3 + i;
    std::vector<double> t;
    for_each_word_of_length(group, shell,
                            [&](const std::vector<std::int32_t>&, const MoebiusMap& m) {
                              const cplx uu = m.a * zn.u + m.b * zn.v;
                              const cplx vv = m.c * zn.u + m.d * zn.v;
                              t.push_back(std::norm(uu) + std::norm(vv));
                            });
    return t;
  });

  auto shell_sum = [&](int i, double s) {
    NeumaierSum acc;
    for (const double t : t_arrays[i]) acc.add(std::pow(t, -s));
    return acc.value();
  };
  // Shell growth ratio geometrically averaged over the last three steps.
  auto growth = [&](double s) { return std::cbrt(shell_sum(3, s) / shell_sum(0, s)); };

  DeltaEstimate out;
  const double f0 = growth(0.0) - 1.0;
  if (f0 <= 0.0) {
    out.delta_hat = 0.0;
    out.below_range = f0 < 0.0;
    return out;
  }
  if (growth(2.0) - 1.0 > 0.0) {
    out.delta_hat = 2.0;
    out.above_range = true;
    return out;
  }
  double lo = 0.0, hi = 2.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (growth(mid) - 1.0 > 0.0 ? lo : hi) = mid;
  }
  out.delta_hat = 0.5 * (lo + hi);
  return out;
}

}  // namespace schottky
