#include "d3ap/gamma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d3ap {

namespace {
// Lanczos g = 7 coefficients
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace

cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  if (z.imag() == 0.0) return std::log(cplx(std::sin(pi * z.real()), 0.0));
  // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i); |e^{2 i pi z}| < 1
  const cplx i(0.0, 1.0);
  cplx w = std::exp(2.0 * i * pi * z);
  return -i * pi * z + i * pi + std::log(1.0 - w) - std::log(2.0) - i * pi / 2.0;
}

cplx log_gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    return std::log(pi) - log_sin_pi(z) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  cplx t = z + 7.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace d3ap
