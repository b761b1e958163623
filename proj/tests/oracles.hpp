#pragma once

// Independent cross-check oracles for the test suite.  Everything here is
// computed from first principles with plain <cmath>/<complex> arithmetic and
// deliberately shares no code with the library's series engine.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Closed-form double integral of the cyclic-group series over the annulus.
//
// The group is z -> m z (0 < |m| < 1) with fundamental annulus |m| <= |z| <= 1
// and the spherical probability measure restricted to it.  The quantity is
//
//   E_{p,q} [ sum_n log| (Y - m^n X)(q - m^n p) / ((Y - m^n p)(q - m^n X)) | ]
//
// over independent samples p, q.  Averaging each log factor over the sample
// angle replaces it by logmax of the radii (mean-value property of log|c-w|),
// and the radial integrals against the density 4s/(Z(1+s^2)^2) ds have
// elementary antiderivatives; only the radially coupled logmax(t, k*s) term
// needs 1D Simpson between its closed-form kinks.
// ---------------------------------------------------------------------------

class AnnulusMeasure {
 public:
  explicit AnnulusMeasure(double inner_radius)
      : mr_(inner_radius), z_(2.0 / (1.0 + inner_radius * inner_radius) - 1.0) {}

  // unnormalized mass of the radial interval [a, b]
  static double weight(double a, double b) { return 2.0 / (1.0 + a * a) - 2.0 / (1.0 + b * b); }

  // antiderivative of log(u)/(1+u)^2; substitution u = s^2 turns
  // integral of 4 s log(s)/(1+s^2)^2 ds into [f2] between squared bounds
  static double f2(double u) { return -std::log(u) / (1.0 + u) + std::log(u / (1.0 + u)); }
  static double log_moment(double a, double b) { return f2(b * b) - f2(a * a); }

  double mean_log() const { return log_moment(mr_, 1.0) / z_; }

  // E[ logmax(s, c) ] for the radial variable s
  double avg_logmax(double c) const {
    if (c <= mr_) return mean_log();
    if (c >= 1.0) return std::log(c);
    return (std::log(c) * weight(mr_, c) + log_moment(c, 1.0)) / z_;
  }

  double density(double s) const {
    const double w = 1.0 + s * s;
    return 4.0 * s / (z_ * w * w);
  }

  // E_s[ avg_logmax(kappa * s) ]: composite Simpson split at the kinks
  double coupled(double kappa) const {
    std::vector<double> cuts{mr_, 1.0};
    for (double k : {mr_ / kappa, 1.0 / kappa})
      if (k > mr_ && k < 1.0) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      const int half_steps = 800;
      const double h = (b - a) / half_steps;
      double acc = 0.0;
      for (int j = 0; j <= half_steps; ++j) {
        const double s = a + h * j;
        const double w = (j == 0 || j == half_steps) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += w * density(s) * avg_logmax(kappa * s);
      }
      total += acc * h / 3.0;
    }
    return total;
  }

  double inner_radius() const { return mr_; }

 private:
  double mr_;
  double z_;
};

inline double annulus_double_integral(std::complex<double> m, std::complex<double> x_pt,
                                      std::complex<double> y_pt, int n_cut = 60) {
  const AnnulusMeasure mu(std::abs(m));
  const double am = std::abs(m);
  double total = 0.0;
  for (int n = -n_cut; n <= n_cut; ++n) {
    const std::complex<double> mn = std::pow(m, n);
    const double kappa = std::pow(am, n);
    total += std::log(std::abs(y_pt - mn * x_pt));      // E[log|Y - m^n X|]
    total += mu.coupled(kappa);                         // E[log|q - m^n p|]
    total -= std::log(kappa) + mu.avg_logmax(std::abs(y_pt) / kappa);  // E[log|Y - m^n p|]
    total -= mu.avg_logmax(kappa * std::abs(x_pt));     // E[log|q - m^n X|]
  }
  return total;
}

// ---------------------------------------------------------------------------
// Brute-force double-coset partition of the free group ball.
//
// Words are letter vectors (+k / -k).  The partition groups words w of
// length <= depth by the relation w ~ a^i w b^j, realized by saturating each
// word's coset with power multiplications until closure inside a padded ball.
// ---------------------------------------------------------------------------

using Letters = std::vector<std::int32_t>;

inline Letters free_reduce(Letters raw) {
  Letters out;
  for (auto s : raw) {
    if (!out.empty() && out.back() == -s)
      out.pop_back();
    else
      out.push_back(s);
  }
  return out;
}

inline Letters concat(const Letters& a, const Letters& b) {
  Letters raw = a;
  raw.insert(raw.end(), b.begin(), b.end());
  return free_reduce(raw);
}

inline std::vector<Letters> ball(int rank, int depth) {
  std::vector<Letters> out{{}};
  std::vector<Letters> frontier{{}};
  for (int n = 0; n < depth; ++n) {
    std::vector<Letters> next;
    for (const auto& w : frontier)
      for (int k = 1; k <= rank; ++k)
        for (int sgn : {+1, -1}) {
          const std::int32_t s = sgn * k;
          if (!w.empty() && w.back() == -s) continue;
          Letters e = w;
          e.push_back(s);
          next.push_back(std::move(e));
        }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// partition of the radius-`depth` ball into <g_k>\Gamma/<g_l> double cosets;
// each coset is the sorted set of its ball members
inline std::vector<std::set<Letters>> brute_double_cosets(int rank, int k, int l, int depth) {
  const auto words = ball(rank, depth);
  const std::set<Letters> in_ball(words.begin(), words.end());
  std::set<Letters> seen;
  std::vector<std::set<Letters>> cosets;
  const int pad = depth + 2;  // powers large enough to connect ball members
  for (const auto& w : words) {
    if (seen.count(w)) continue;
    std::set<Letters> coset;
    for (int i = -pad; i <= pad; ++i)
      for (int j = -pad; j <= pad; ++j) {
        Letters gi, gj;
        for (int t = 0; t < std::abs(i); ++t) gi.push_back(i > 0 ? k : -k);
        for (int t = 0; t < std::abs(j); ++t) gj.push_back(j > 0 ? l : -l);
        const Letters m = concat(concat(gi, w), gj);
        if (in_ball.count(m)) coset.insert(m);
      }
    for (const auto& m : coset) seen.insert(m);
    cosets.push_back(std::move(coset));
  }
  return cosets;
}

}  // namespace oracles
