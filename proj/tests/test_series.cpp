#include <cmath>
#include <complex>

#include "doctest.h"
#include "schottky/arakelov.hpp"
#include "schottky/series.hpp"
#include "test_fixtures.hpp"

using namespace schottky;
using fixtures::cyclic;
using fixtures::four_disk;
using fixtures::pt;

TEST_CASE("estimate finalization: totals, slopes, verdicts") {
  // geometric decay: slope = log(0.1), converging
  const auto dec = finalize_estimate({{0, 1.0}, {1, 0.1}, {2, 0.01}, {3, 0.001}});
  CHECK(dec.total == doctest::Approx(1.111).epsilon(1e-12));
  CHECK(dec.tail_slope == doctest::Approx(std::log(0.1)).epsilon(1e-9));
  CHECK(dec.verdict == Verdict::Converging);

  const auto grow = finalize_estimate({{0, 1.0}, {1, 2.0}, {2, 4.0}, {3, 8.0}});
  CHECK(grow.verdict == Verdict::Diverging);

  const auto flat = finalize_estimate({{0, 0.5}, {1, -0.5}, {2, 0.5}, {3, -0.5}});
  CHECK(flat.tail_slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat.verdict == Verdict::Inconclusive);

  // fewer than two usable shells: slope 0, inconclusive
  const auto lone = finalize_estimate({{0, 3.0}, {1, 0.0}});
  CHECK(lone.tail_slope == 0.0);
  CHECK(lone.verdict == Verdict::Inconclusive);

  // the slope window ignores zero shells
  const auto gappy = finalize_estimate({{0, 1.0}, {1, 0.0}, {2, 0.01}, {3, 0.0}, {4, 1e-4}});
  CHECK(gappy.verdict == Verdict::Converging);
}

TEST_CASE("divisors: degree and admissibility checks") {
  const Divisor d{{{pt(0.1), +1}, {pt(-0.3), -1}}};
  CHECK(d.degree() == 0);
  CHECK_NOTHROW(check_divisor(d, true));

  CHECK_THROWS_AS(check_divisor(Divisor{}, false), std::invalid_argument);
  CHECK_THROWS_AS(check_divisor(Divisor{{{pt(0.1), +1}}}, true), std::invalid_argument);
  CHECK_THROWS_AS(check_divisor(Divisor{{{pt(0.1), 0}, {pt(0.2), 0}}}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_divisor(Divisor{{{pt(0.1), +1}, {pt(0.1), -1}}}, true),
                  std::invalid_argument);
}

TEST_CASE("cross-ratio series: oracle value, shells, determinism") {
  const auto g = cyclic(0.1);
  const auto est = green_series(g, pt(2.0), pt(3.0), pt(1.0), pt(4.0), 40);
  CHECK(est.total == doctest::Approx(-1.2025411120077674).epsilon(1e-13));
  CHECK(est.verdict == Verdict::Converging);
  REQUIRE(est.shell_sums.size() == 41);
  // identity shell is the plain cross-ratio log
  CHECK(est.shell_sums[0].partial ==
        doctest::Approx(std::log(std::abs(cross_ratio_value(pt(2.0), pt(3.0), pt(1.0), pt(4.0)))))
            .epsilon(1e-12));

  // shell-parallel evaluation is bit-identical
  const auto par = green_series(g, pt(2.0), pt(3.0), pt(1.0), pt(4.0), 40, 4);
  CHECK(par.total == est.total);
  for (std::size_t i = 0; i < est.shell_sums.size(); ++i)
    CHECK(par.shell_sums[i].partial == est.shell_sums[i].partial);
}

TEST_CASE("cross-ratio series: guards") {
  const auto g = cyclic(0.1);
  CHECK_THROWS_AS(green_series(g, pt(2.0), pt(2.0), pt(1.0), pt(4.0), 5), std::invalid_argument);
  CHECK_THROWS_AS(green_series(g, pt(2.0), pt(3.0), pt(1.0), pt(4.0), -1), std::invalid_argument);
  CHECK_THROWS_AS(green_series(four_disk(), pt(2.0), pt(3.0), pt(1.0), pt(4.0), 25),
                  CapacityExceeded);

  // q collides exactly with the length-1 orbit of p (multiplier 0.25 keeps
  // the normalized generator exact): the degenerate word is named
  const auto gd = cyclic(0.25);
  try {
    green_series(gd, pt(2.0), pt(0.25), pt(3.0), pt(1.0), 5);
    CHECK(false);
  } catch (const DegenerateCrossRatio& e) {
    CHECK(e.word == std::vector<std::int32_t>{1});
  }
}

TEST_CASE("multiplicative product bridges the series") {
  // log|W(d, base; r)| telescopes to the series total on both fixtures:
  // for d = (y)-(q) the product estimate is green_series(y, q, r, base)
  const auto g1 = cyclic(0.1);
  const Divisor d1{{{pt(2.0), +1}, {pt(3.0), -1}}};
  const auto wp1 = w_product(g1, d1, pt(4.0), pt(1.0), 40);
  const auto gr1 = green_series(g1, pt(2.0), pt(3.0), pt(1.0), pt(4.0), 40);
  CHECK(std::log(std::abs(wp1.value)) == doctest::Approx(gr1.total).epsilon(1e-12));
  CHECK(wp1.estimate.total == gr1.total);  // same terms, same order: bit-equal

  const auto g2 = four_disk();
  const Divisor d2{{{pt(0.1), +1}, {pt(-0.3), -1}}};
  const auto wp2 = w_product(g2, d2, pt(-0.1, -0.5), pt(0.2, 0.4), 8);
  const auto gr2 = green_series(g2, pt(0.1), pt(-0.3), pt(0.2, 0.4), pt(-0.1, -0.5), 8);
  CHECK(wp2.estimate.total == gr2.total);
}

TEST_CASE("product evaluation at an orbit point names the pole") {
  const auto g = cyclic(0.1);
  const Divisor d{{{pt(2.0), +1}, {pt(3.0), -1}}};
  // z = g^{-1}(divisor point): some word maps z exactly onto the divisor
  CHECK_THROWS_AS(w_product(g, d, pt(1.0), pt(20.0), 5), PoleHit);
}

TEST_CASE("logarithmic derivative matches central differences") {
  const auto g = four_disk();
  const Divisor d{{{pt(0.3, 0.2), +1}, {pt(-0.4, 0.1), -1}}};
  const ProjectivePoint base = pt(0.1, -0.6);
  const double h = 1e-5;
  for (const cplx z : {cplx(0.9, 0.7), cplx(-1.1, 0.2), cplx(0.0, -0.9)}) {
    const cplx wm = w_product(g, d, base, ProjectivePoint::from_complex(z - h), 6).value;
    const cplx wp = w_product(g, d, base, ProjectivePoint::from_complex(z + h), 6).value;
    const cplx w0 = w_product(g, d, base, ProjectivePoint::from_complex(z), 6).value;
    const cplx fd = (wp - wm) / (2.0 * h * w0);
    const cplx an = dlog_w(g, d, base, ProjectivePoint::from_complex(z), 6);
    CHECK(std::abs(fd - an) <= 1e-7 * std::abs(an));
  }

  CHECK_THROWS_AS(dlog_w(g, d, base, ProjectivePoint::infinity(), 6), std::invalid_argument);
  CHECK_THROWS_AS(dlog_w(g, Divisor{{{pt(0.3), +1}}}, base, pt(0.9), 6), std::invalid_argument);
}

TEST_CASE("period coefficients: cyclic closed form") {
  const auto g = cyclic(0.1);
  // X = -i log|a/b| / log|q|; fixed points 0 and infinity collapse the
  // numerator cross-ratios to a/b and the diagonal rule gives log|q|
  const auto xm = x_matrix(g, pt(2.0), pt(5.0), 4, 4);
  REQUIRE(xm.rank == 1);
  CHECK(xm.entry(1, 1).real() == 0.0);
  CHECK(xm.entry(1, 1).imag() ==
        doctest::Approx(-std::log(std::abs(2.0 / 5.0)) / std::log(0.1)).epsilon(1e-12));

  // equal moduli: zero
  const auto x0 = x_matrix(g, pt(0.3, 0.4), pt(0.5, 0.0), 4, 4);
  CHECK(std::abs(x0.entry(1, 1)) < 1e-14);

  // invariance under a scaling, which fixes the generator's fixed-point set
  const auto xs = x_matrix(g, pt(2.0 * 1.7, 2.0 * 0.3), pt(5.0 * 1.7, 5.0 * 0.3), 4, 4);
  CHECK(std::abs(xs.entry(1, 1) - xm.entry(1, 1)) < 1e-10);

  CHECK_THROWS_AS(xm.entry(1, 2), std::invalid_argument);
}

TEST_CASE("period coefficients on the symmetric four-disk group") {
  const auto g = four_disk();
  // conjugation symmetry cancels the off-diagonal denominators exactly
  CHECK_THROWS_AS(x_matrix(g, pt(0.1, 0.1), pt(-0.4), 6, 6), SingularDenominator);

  // the diagonal stays finite and purely imaginary
  const auto xd = x_diagonal(g, pt(0.1, 0.1), pt(-0.4), 6, 6);
  REQUIRE(xd.size() == 2);
  CHECK(xd[0].real() == 0.0);
  CHECK(xd[1].real() == 0.0);
  CHECK(xd[0].imag() == doctest::Approx(0.121002909691666).epsilon(1e-9));
  CHECK(xd[1].imag() == doctest::Approx(0.024267060551511).epsilon(1e-9));

  // the reflection z -> -z conjugates each generator to its inverse, so
  // reflecting both evaluation points flips every diagonal entry's sign
  const auto xr = x_diagonal(g, pt(-0.1, -0.1), pt(0.4), 6, 6);
  CHECK(std::abs(xr[0] + xd[0]) < 1e-10);
  CHECK(std::abs(xr[1] + xd[1]) < 1e-10);
}

TEST_CASE("contour quadrature: exact residues and instability detection") {
  const auto g = four_disk();
  // f(z) = 1/(z - c) with c the center of D_1: the period is 2 pi i
  const cplx c(2.0, 0.0);
  const cplx per = period_integral(
      g, [&](const cplx& z) { return 1.0 / (z - c); }, 1, 64);
  CHECK(std::abs(per - cplx(0.0, 2.0 * std::acos(-1.0))) < 1e-12);

  // pole outside the contour: zero
  const cplx zero = period_integral(
      g, [&](const cplx& z) { return 1.0 / (z + 2.0); }, 1, 64);
  CHECK(std::abs(zero) < 1e-12);

  // a pole hugging the contour defeats the node-halving check
  const cplx close_pole(2.0 + 0.5 * 1.004, 0.0);
  CHECK_THROWS_AS(period_integral(
                      g, [&](const cplx& z) { return 1.0 / (z - close_pole); }, 1, 64),
                  QuadratureUnstable);

  CHECK_THROWS_AS(period_integral(
                      g, [](const cplx&) { return cplx(0.0); }, 1, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(period_integral(
                      g, [](const cplx&) { return cplx(0.0); }, 3, 64),
                  std::invalid_argument);
}

TEST_CASE("assembled form: one-shot equals cached evaluator") {
  const auto g = four_disk();
  AssembleParams params;
  params.max_len = 5;
  params.conj_depth = 4;
  params.coset_depth = 4;
  params.z0 = pt(0.1, -0.6);
  params.z1 = pt(0.7, 0.5);
  const auto form = make_assembled_form(g, pt(0.3, 0.2), pt(-0.4, 0.1), params);
  REQUIRE(form.coefficients().size() == 2);
  const cplx z(0.9, -0.8);
  CHECK(form(z) == assemble_omega(g, pt(0.3, 0.2), pt(-0.4, 0.1), pt(0.9, -0.8), params));
  CHECK(std::abs(form(z)) > 0.0);
}

TEST_CASE("critical-exponent estimator") {
  // rank 1: polynomial shell growth, exponent 0
  const auto d1 = estimate_delta(cyclic(0.1), pt(0.3, 0.2), 8);
  CHECK(d1.delta_hat == 0.0);
  CHECK(!d1.below_range);
  CHECK(!d1.above_range);

  // four-disk fixture: strictly inside (0, 1) and stable in the cutoff
  const auto d2 = estimate_delta(four_disk(), pt(0.3, 0.2), 8);
  CHECK(d2.delta_hat == doctest::Approx(0.298402914376689).epsilon(1e-9));
  const auto d2b = estimate_delta(four_disk(), pt(0.3, 0.2), 10);
  CHECK(std::abs(d2.delta_hat - d2b.delta_hat) < 1e-3);

  // threads do not change bits
  const auto d2p = estimate_delta(four_disk(), pt(0.3, 0.2), 8, 4);
  CHECK(d2p.delta_hat == d2.delta_hat);

  CHECK_THROWS_AS(estimate_delta(cyclic(0.1), pt(0.3), 5), std::invalid_argument);
}
