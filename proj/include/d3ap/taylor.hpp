#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace d3ap {

// Truncated Taylor arithmetic about a fixed expansion point: c[k] is the
// coefficient of u^k. Drives the triple-pole residue (order 2) and the
// smooth-window derivatives (order 4) without numerical differentiation.
template <int Order>
struct TaylorJet {
  static_assert(Order >= 1);
  std::array<double, Order + 1> c{};

  static TaylorJet constant(double v) {
    TaylorJet j;
    j.c[0] = v;
    return j;
  }
  static TaylorJet variable(double v) {
    TaylorJet j;
    j.c[0] = v;
    j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }
  double deriv(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  friend TaylorJet operator+(const TaylorJet& a, const TaylorJet& b) {
    TaylorJet r;
    for (int i = 0; i <= Order; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
  }
  friend TaylorJet operator-(const TaylorJet& a, const TaylorJet& b) {
    TaylorJet r;
    for (int i = 0; i <= Order; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
  }
  friend TaylorJet operator-(const TaylorJet& a) {
    TaylorJet r;
    for (int i = 0; i <= Order; ++i) r.c[i] = -a.c[i];
    return r;
  }
  friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
    TaylorJet r;
    for (int i = 0; i <= Order; ++i)
      for (int j = 0; i + j <= Order; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
  friend TaylorJet operator+(const TaylorJet& a, double s) { return a + constant(s); }
  friend TaylorJet operator+(double s, const TaylorJet& a) { return a + constant(s); }
  friend TaylorJet operator-(const TaylorJet& a, double s) { return a - constant(s); }
  friend TaylorJet operator-(double s, const TaylorJet& a) { return constant(s) - a; }
  friend TaylorJet operator*(const TaylorJet& a, double s) {
    TaylorJet r;
    for (int i = 0; i <= Order; ++i) r.c[i] = a.c[i] * s;
    return r;
  }
  friend TaylorJet operator*(double s, const TaylorJet& a) { return a * s; }

  TaylorJet reciprocal() const {
    if (c[0] == 0.0) throw std::domain_error("TaylorJet::reciprocal: zero constant term");
    TaylorJet r;
    r.c[0] = 1.0 / c[0];
    for (int k = 1; k <= Order; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += c[j] * r.c[k - j];
      r.c[k] = -acc / c[0];
    }
    return r;
  }
  friend TaylorJet operator/(const TaylorJet& a, const TaylorJet& b) { return a * b.reciprocal(); }
  friend TaylorJet operator/(double s, const TaylorJet& b) { return b.reciprocal() * s; }
  friend TaylorJet operator/(const TaylorJet& a, double s) { return a * (1.0 / s); }

  // E = exp(A): E' = A'E gives k E_k = sum_{j=1..k} j A_j E_{k-j}.
  TaylorJet exp() const {
    TaylorJet r;
    r.c[0] = std::exp(c[0]);
    for (int k = 1; k <= Order; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += j * c[j] * r.c[k - j];
      r.c[k] = acc / k;
    }
    return r;
  }
};

}  // namespace d3ap
