#pragma once

#include <complex>

namespace d3ap {

// Neumaier-compensated accumulator; used in the O(q^3) brute-force paths
// where q^3 unit-modulus terms would otherwise lose 3-4 digits.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;

  void add(double v) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct KahanCSum {
  KahanSum re, im;

  void add(std::complex<double> v) {
    re.add(v.real());
    im.add(v.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace d3ap
