#pragma once

#include <complex>
#include <vector>

namespace d3ap {

using cplx = std::complex<double>;

// Stieltjes constants for the Laurent expansion
// (s-1) zeta(s) = 1 + gamma0 (s-1) - gamma1 (s-1)^2 + O((s-1)^3).
inline constexpr double kEulerGamma = 0.5772156649015329;        // gamma_0
inline constexpr double kStieltjesGamma1 = -0.0728158454836767;  // gamma_1

struct HurwitzSettings {
  int min_shift = 12;        // floor on the Euler-Maclaurin shift count M
  int bernoulli_order = 20;  // correction terms J
  double tol = 1e-12;        // absolute error target
};

// B_{2j}/(2j)! for j = 1..count, from 2 (-1)^{j+1} zeta(2j) / (2 pi)^{2j}.
const std::vector<double>& bernoulli_over_factorial(int count = 40);

// Hurwitz zeta(s, a) for a > 0, s != 1, by Euler-Maclaurin with the shift
// count scaled to |Im s| (M >= |Im s|/2 + min_shift) so the correction
// series stays convergent on the critical line.
cplx hurwitz_zeta(cplx s, double a, const HurwitzSettings& hs = {});

cplx riemann_zeta(cplx s, const HurwitzSettings& hs = {});

}  // namespace d3ap
