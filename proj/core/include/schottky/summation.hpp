#pragma once

#include <cmath>
#include <complex>

namespace schottky {

// Kahan-Babuska-Neumaier compensated accumulator.  All series in this library
// are summed with it in a fixed canonical order, which is what makes totals
// bit-stable across runs and thread counts.
struct NeumaierSum {
  double s = 0.0;  // running sum
  double c = 0.0;  // running compensation

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// Componentwise compensated accumulator for complex series.
struct NeumaierSumC {
  NeumaierSum re, im;

  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace schottky
