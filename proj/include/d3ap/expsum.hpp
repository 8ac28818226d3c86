#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "d3ap/arith.hpp"

namespace d3ap {

struct MainTermModel;  // mainterm.hpp

// h(a) = sum_{x < n <= 2x, n = a (q)} d3(n), a = 1..q (a = q is the zero
// class).
struct APCounts {
  std::uint64_t q = 0;
  double x = 0.0;
  std::vector<std::int64_t> counts;  // [1..q]

  std::int64_t total() const;
};

APCounts ap_counts(const SieveTable& sieve, double x, std::uint64_t q);

// S(r) = sum_{x < n <= 2x} d3(n) e(nr/q) and Delta(r/q) = S(r) - F_x(q/(q,r)),
// r = 1..q.
struct ResidueSpectrum {
  std::uint64_t q = 0;
  double x = 0.0;
  std::vector<cplx> raw;    // [1..q]
  std::vector<cplx> delta;  // [1..q]

  double sum_raw_sq() const;
  double sum_delta_sq() const;
};

// Raw spectrum by length-q DFT of the class counts; F values from the model
// (prime q: F_x(q) off the zero frequency, F_x(1) at r = q).
ResidueSpectrum delta_spectrum(const APCounts& counts, const MainTermModel& model);

// R_{a,b,c}(h/q) = sum_{1<=x,y,z<=q} e((ax+by+cz-hxyz)/q), prime q, (h,q)=1.
// Fast path: closed form q(2 + c_q(a)+c_q(b)+c_q(c) - q) when q | abc, else
// the collapsed z-sum q K(a, b c hbar; q). The sum is exactly real.
cplx R_abc(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t h, std::uint64_t q);

// O(q^3) defining triple sum; the oracle for R_abc.
cplx R_abc_brute(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t h, std::uint64_t q);

// A_{h/q}(n) = (1/2) sum_{abc=n} R_{a,b,c}(h/q). Dispatch: Kloosterman fast
// path for (n,q) = 1, the alpha = v_q(n) closed form d3(n)[C_alpha q^2 - q/2]
// for q | n.
cplx A_hq(std::uint64_t n, std::int64_t h, std::uint64_t q, const SieveTable& sieve);

// Generic path over ordered factorization triples; brute_R selects the
// O(q^3) oracle for R.
cplx A_hq_triple_sum(std::uint64_t n, std::int64_t h, std::uint64_t q, const SieveTable& sieve,
                     bool brute_R = false);

// sum_{h=1}^{q-1} A_{h/q}(n) conj(A_{h/q}(m)); for (nm,q) = 1 this equals
// q^3 d3(m) d3(n) c_q(m-n)/4 - q^2 d3(m) d3(n)/4.
cplx h_correlation(std::uint64_t n, std::uint64_t m, std::uint64_t q, const SieveTable& sieve);

// Closed form of the right-hand side above.
double lemma3_rhs(std::uint64_t n, std::uint64_t m, std::uint64_t q, const SieveTable& sieve);

// sum_{n<=N, m<=M, (nm,q)=1} d3(n) d3(m) c_q(n-m) in O(N+M+q), using
// c_q(k) = q [q|k] - 1 for prime q. Exact integer arithmetic internally.
double bilinear_cq_sum(std::uint64_t N, std::uint64_t M, std::uint64_t q, const SieveTable& sieve);

// The three displayed sums with n,m > q and (nm,q) = 1; P are polynomial
// coefficients for P(log n/Q), constant term first.
//   1: sum_{n,m<=Q} d3 d3 c_q(n-m) P(log n/Q) P(log m/Q)
//   2: sum_{n<=Q < m<=T} d3 d3 c_q(n-m) P(log n/Q) m^{-2/3} e((n/Q)^{1/3})
//   3: sum_{Q<n,m<=T} d3 d3 c_q(n-m) (nm)^{-2/3} e((n/Q)^{1/3} - (m/Q)^{1/3})
cplx lemma9_lhs(int variant, double Q, double T, std::uint64_t q, std::span<const double> P,
                const SieveTable& sieve);

// spectrum_x{X}_q{Q}.csv with columns r, Re S, Im S, Re Delta, Im Delta,
// |Delta|^2.
std::filesystem::path write_spectrum_csv(const ResidueSpectrum& spectrum,
                                         const std::filesystem::path& dir);

}  // namespace d3ap
