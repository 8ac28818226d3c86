#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d3ap/arith.hpp"

namespace d3ap {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform; a.size() must be a power of two.
void fft_pow2_inplace(std::vector<cplx>& a, bool inverse);

// X[k] = sum_j a[j] e(sign * jk / n), sign in {+1,-1}. The direct path is
// exact-angle (jk reduced mod n) and serves as the oracle for the chirp
// transform.
std::vector<cplx> dft_direct(std::span<const cplx> a, int sign);

// Bluestein chirp transform for arbitrary length (prime lengths included).
std::vector<cplx> dft_bluestein(std::span<const cplx> a, int sign);

// Dispatch: direct O(n^2) below this threshold, Bluestein above.
inline constexpr std::size_t kFastTransformThreshold = std::size_t(1) << 10;

std::vector<cplx> dft(std::span<const cplx> a, int sign);

}  // namespace d3ap
