#include "d3ap/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d3ap {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_pow2_inplace: length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
    cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& v : a) v /= static_cast<double>(n);
  }
}

std::vector<cplx> dft_direct(std::span<const cplx> a, int sign) {
  const std::size_t n = a.size();
  std::vector<cplx> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) *
                 static_cast<double>(sign);
    root[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += a[j] * root[j * k % n];
    }
    out[k] = acc;
  }
  return out;
}

std::vector<cplx> dft_bluestein(std::span<const cplx> a, int sign) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  if (sign < 0) {
    // DFT_-(x) = conj(DFT_+(conj x))
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = std::conj(a[j]);
    auto y = dft_bluestein(c, +1);
    for (auto& v : y) v = std::conj(v);
    return y;
  }

  // nk = (n^2 + k^2 - (k-n)^2)/2; squares reduced mod 2n keep the chirp
  // angles small and exact.
  const std::size_t L = next_pow2(2 * n - 1);
  std::vector<cplx> chirp(n);  // mu_j = e^{i pi j^2 / n}
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t jsq = static_cast<std::uint64_t>(j) * j % (2 * n);
    double ang = std::numbers::pi * static_cast<double>(jsq) / static_cast<double>(n);
    chirp[j] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> fa(L, cplx(0.0)), fb(L, cplx(0.0));
  for (std::size_t j = 0; j < n; ++j) fa[j] = a[j] * chirp[j];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) fb[j] = fb[L - j] = std::conj(chirp[j]);

  fft_pow2_inplace(fa, false);
  fft_pow2_inplace(fb, false);
  for (std::size_t j = 0; j < L; ++j) fa[j] *= fb[j];
  fft_pow2_inplace(fa, true);

  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fa[k] * chirp[k];
  return out;
}

std::vector<cplx> dft(std::span<const cplx> a, int sign) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  if ((n & (n - 1)) == 0) {
    std::vector<cplx> v(a.begin(), a.end());
    fft_pow2_inplace(v, sign < 0);
    if (sign < 0) {
      for (auto& z : v) z *= static_cast<double>(n);  // unnormalized convention
    }
    return v;
  }
  if (n < kFastTransformThreshold) return dft_direct(a, sign);
  return dft_bluestein(a, sign);
}

}  // namespace d3ap
