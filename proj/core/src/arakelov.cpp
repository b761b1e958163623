#include "schottky/arakelov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "schottky/detail/rng.hpp"
#include "schottky/summation.hpp"

namespace schottky {

namespace {

constexpr double kPi = std::numbers::pi;

// Nonzero-prefix consecutive differences (P_i) - (P_{i+1}) with weights
// e_i = m_1 + ... + m_i; their weighted sum telescopes back to the divisor.
struct WeightedPair {
  ProjectivePoint plus, minus;
  int weight;
};

std::vector<WeightedPair> prefix_pairs(const Divisor& d) {
  std::vector<WeightedPair> pairs;
  int prefix = 0;
  for (std::size_t i = 0; i + 1 < d.terms.size(); ++i) {
    prefix += d.terms[i].weight;
    if (prefix != 0) pairs.push_back({d.terms[i].point, d.terms[i + 1].point, prefix});
  }
  return pairs;
}

}  // namespace

PairingReport height_pairing(const SchottkyGroup& group, const Divisor& a, const Divisor& b,
                             int max_len, int threads, std::uint64_t capacity) {
  check_divisor(a, true);
  check_divisor(b, true);
  for (const DivisorTerm& ta : a.terms)
    for (const DivisorTerm& tb : b.terms)
      if (chordal(ta.point, tb.point) <= 1e-12)
        throw OverlappingSupports("divisor supports must be disjoint");

  const std::vector<WeightedPair> pa = prefix_pairs(a);
  const std::vector<WeightedPair> pb = prefix_pairs(b);

  PairingReport report;
  report.max_len = max_len;
  report.terms.reserve(pa.size() * pb.size());
  NeumaierSum acc;
  for (const WeightedPair& ea : pa) {
    for (const WeightedPair& fb : pb) {
      PairingTerm term;
      term.a_plus = ea.plus;
      term.a_minus = ea.minus;
      term.b_plus = fb.plus;
      term.b_minus = fb.minus;
      term.weight = ea.weight * fb.weight;
      term.estimate = green_series(group, ea.plus, ea.minus, fb.plus, fb.minus, max_len,
                                   threads, capacity);
      acc.add(static_cast<double>(term.weight) * term.estimate.total);
      report.terms.push_back(std::move(term));
    }
  }
  report.value = acc.value();
  return report;
}

std::vector<ProjectivePoint> sample_fundamental_domain(const SchottkyGroup& group, int n,
                                                       std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  std::vector<ProjectivePoint> out;
  out.reserve(n);
  std::uint64_t proposals = 0;
  while (static_cast<int>(out.size()) < n) {
    std::uint64_t state = detail::stream_state(seed, proposals);
    // Area-uniform sphere point: Z uniform on [-1, 1], azimuth uniform, then
    // stereographic projection from the north pole.
    const double zc = 2.0 * detail::uniform01(state) - 1.0;
    const double phi = 2.0 * kPi * detail::uniform01(state);
    ++proposals;
    ProjectivePoint pt;
    if (zc == 1.0) {
      pt = ProjectivePoint::infinity();
    } else {
      const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      pt = ProjectivePoint::from_complex(cplx(r * std::cos(phi), r * std::sin(phi)) /
                                         (1.0 - zc));
    }
    bool inside = false;
    for (const OrientedDisk& d : group.disks()) {
      if (d.contains_open(pt)) {
        inside = true;
        break;
      }
    }
    if (!inside) out.push_back(pt);
    if (proposals % 10000 == 0 && out.size() * 100 < proposals) {
      std::ostringstream os;
      os << "fundamental-domain rejection sampler accepted " << out.size() << " of "
         << proposals << " proposals (< 1%)";
      throw RejectionStarvation(os.str());
    }
  }
  return out;
}

MonteCarloEstimate green_double_integral(const SchottkyGroup& group, const ProjectivePoint& x,
                                         const ProjectivePoint& y, int n_samples,
                                         std::uint64_t seed, int max_len, int threads,
                                         std::uint64_t capacity) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const ProjectivePoint xn = x.normalized(), yn = y.normalized();
  if (approx_equal(xn, yn)) throw std::invalid_argument("x and y must be distinct");
  for (const OrientedDisk& d : group.disks())
    if (d.contains_open(xn) || d.contains_open(yn))
      throw std::invalid_argument("x and y must lie in the fundamental domain");

  const std::vector<ProjectivePoint> samples =
      sample_fundamental_domain(group, 2 * n_samples, seed);

  std::vector<double> values(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const ProjectivePoint& p = samples[2 * static_cast<std::size_t>(i)];
    const ProjectivePoint& q = samples[2 * static_cast<std::size_t>(i) + 1];
    values[i] = green_series(group, yn, q, xn, p, max_len, threads, capacity).total;
  }

  NeumaierSum mean_acc;
  for (const double v : values) mean_acc.add(v);
  const double mean = mean_acc.value() / n_samples;
  NeumaierSum var_acc;
  for (const double v : values) var_acc.add((v - mean) * (v - mean));
  const double sample_sd = std::sqrt(var_acc.value() / (n_samples - 1));

  MonteCarloEstimate est;
  est.mean = mean;
  est.std_error = sample_sd / std::sqrt(static_cast<double>(n_samples));
  est.n_samples = n_samples;
  est.seed = seed;
  return est;
}

namespace {

cplx oracle_point(const ProjectivePoint& pt) {
  if (pt.is_infinite())
    throw std::invalid_argument("oracle points must avoid 0 and infinity");
  const cplx z = pt.to_complex();
  if (!(std::abs(z) > 0.0))
    throw std::invalid_argument("oracle points must avoid 0 and infinity");
  return z;
}

}  // namespace

double cyclic_oracle(const cplx& multiplier, const ProjectivePoint& y,
                     const ProjectivePoint& q_pt, const ProjectivePoint& x,
                     const ProjectivePoint& p, double tol) {
  const double aq = std::abs(multiplier);
  if (!(aq > 0.0) || aq >= 1.0)
    throw std::invalid_argument("multiplier must satisfy 0 < |q| < 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (aq > 0.99)
    throw ToleranceUnreachable("multiplier too close to the unit circle for the tail bound");

  const cplx pts[4] = {oracle_point(y), oracle_point(q_pt), oracle_point(x), oracle_point(p)};
  double min_gap = std::abs(pts[0]);
  double max_abs = 0.0;
  for (int i = 0; i < 4; ++i) {
    min_gap = std::min(min_gap, std::abs(pts[i]));
    max_abs = std::max(max_abs, std::abs(pts[i]));
    for (int j = i + 1; j < 4; ++j) {
      const double gap = std::abs(pts[i] - pts[j]);
      if (!(gap > 0.0)) throw std::invalid_argument("oracle points must be pairwise distinct");
      min_gap = std::min(min_gap, gap);
    }
  }

  // Conservative geometric tail bound: |term(n)| <= C |q|^|n| once the
  // orbit points are deep in the contracting ends, so the two tails past N
  // total at most 2 C |q|^N / (1 - |q|).
  const double C = 16.0 * std::max(1.0, max_abs * max_abs) / (min_gap * min_gap);
  int cutoff = 8;
  while (C * std::pow(aq, cutoff) / (1.0 - aq) >= 0.25 * tol) {
    if (++cutoff > 200000)
      throw ToleranceUnreachable("tail bound will not reach the requested tolerance");
  }

  const auto term = [&](int n) {
    const cplx w = std::pow(multiplier, static_cast<double>(n));
    const cplx ox = w * pts[2];
    const cplx op = w * pts[3];
    const cplx num = (pts[0] - ox) * (pts[1] - op);
    const cplx den = (pts[0] - op) * (pts[1] - ox);
    return std::log(std::abs(num / den));
  };
  const auto bilateral = [&](int n_max) {
    NeumaierSum s;
    s.add(term(0));
    for (int n = 1; n <= n_max; ++n) {
      s.add(term(n));
      s.add(term(-n));
    }
    return s.value();
  };

  const double once = bilateral(cutoff);
  const double twice = bilateral(2 * cutoff);
  if (std::abs(once - twice) > tol)
    throw ToleranceUnreachable("doubling the cutoff moved the sum by more than tol");
  return twice;
}

}  // namespace schottky
