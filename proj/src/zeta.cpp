#include "d3ap/zeta.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "d3ap/kahan.hpp"

namespace d3ap {

const std::vector<double>& bernoulli_over_factorial(int count) {
  static std::vector<double> table;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<int>(table.size()) < count) {
    table.assign(count + 1, 0.0);
    double two_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    double denom = 1.0;  // (2 pi)^{2j}
    for (int j = 1; j <= count; ++j) {
      denom *= two_pi_sq;
      double z;
      if (j == 1) {
        z = std::numbers::pi * std::numbers::pi / 6.0;
      } else {
        // zeta(2j) by direct summation; tail below 1e-20 needs
        // n ~ (5e18)^{1/(2j-1)}, worst ~1300 at j = 2
        z = 1.0;
        for (int n = 2; n < 4000; ++n) {
          double t = std::pow(static_cast<double>(n), -2.0 * j);
          z += t;
          if (t * n < 1e-20 * (2.0 * j - 1.0)) break;
        }
      }
      table[j] = ((j % 2 == 1) ? 2.0 : -2.0) * z / denom;
    }
  }
  return table;
}

cplx hurwitz_zeta(cplx s, double a, const HurwitzSettings& hs) {
  if (s == cplx(1.0, 0.0)) throw std::invalid_argument("hurwitz_zeta: s = 1 is the pole");
  if (!(a > 0.0)) throw std::invalid_argument("hurwitz_zeta: a must be positive");

  const auto& coef = bernoulli_over_factorial(std::max(hs.bernoulli_order + 4, 24));
  const int J = hs.bernoulli_order;
  int M = std::max(hs.min_shift, static_cast<int>(std::ceil(std::abs(s.imag()) / 2.0)) + hs.min_shift);

  for (int attempt = 0; attempt < 5; ++attempt, M *= 2) {
    KahanCSum main_sum;
    for (int k = 0; k < M; ++k) {
      main_sum.add(std::exp(-s * std::log(static_cast<double>(k) + a)));
    }
    const double MA = M + a;
    const double logMA = std::log(MA);
    cplx acc = main_sum.value();
    acc += std::exp((1.0 - s) * logMA) / (s - 1.0);
    acc += 0.5 * std::exp(-s * logMA);

    // sum_j B_{2j}/(2j)! (s)_{2j-1} (M+a)^{-s-2j+1}
    cplx poch = s;                                 // (s)_1
    cplx pw = std::exp(-(s + 1.0) * logMA);        // (M+a)^{-s-1}
    const double inv2 = 1.0 / (MA * MA);
    bool shrinking = true;
    double prev_mag = 1e300;
    int j = 1;
    cplx term;
    for (; j <= J; ++j) {
      term = coef[j] * poch * pw;
      double mag = std::abs(term);
      if (mag > prev_mag) {
        shrinking = false;  // asymptotic series turned; need a larger M
        break;
      }
      acc += term;
      prev_mag = mag;
      if (mag < hs.tol * 0.25) break;
      poch *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
      pw *= inv2;
    }
    if (!shrinking) continue;

    // standard remainder bound: |R| <= |next term| * |s+2j+1| / (sigma+2j+1)
    poch *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    pw *= inv2;
    cplx next = coef[std::min<int>(j + 1, static_cast<int>(coef.size()) - 1)] * poch * pw;
    double kappa = std::abs(s + static_cast<double>(2 * j + 1)) /
                   std::max(1.0, s.real() + static_cast<double>(2 * j + 1));
    if (std::abs(next) * kappa < hs.tol) return acc;
  }
  throw std::runtime_error("hurwitz_zeta: tolerance not reached within the shift budget");
}

cplx riemann_zeta(cplx s, const HurwitzSettings& hs) { return hurwitz_zeta(s, 1.0, hs); }

}  // namespace d3ap
