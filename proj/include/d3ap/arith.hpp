#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace d3ap {

using cplx = std::complex<double>;

// Deterministic primality by trial division up to sqrt(n); intended for
// desk-scale moduli.
bool is_prime(std::uint64_t n);

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

// Inverse modulo a prime p via Fermat exponentiation a^(p-2).
std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t p);

struct PrimePower {
  std::uint64_t p;
  std::uint32_t a;
};
std::vector<PrimePower> factor_u64(std::uint64_t n);
int mobius_u64(std::uint64_t n);
std::uint64_t euler_phi_u64(std::uint64_t n);

// Multiplicative-function tables on 1..limit, indexed directly (entry 0
// unused). Immutable after construction.
struct SieveTable {
  std::uint64_t limit = 0;
  std::vector<std::uint32_t> d3;   // ordered triples with abc = n
  std::vector<std::int8_t> mu;
  std::vector<std::uint64_t> phi;
  std::vector<std::uint32_t> spf;  // smallest prime factor, spf[1] = 1

  std::vector<PrimePower> factor(std::uint64_t n) const;
  std::vector<std::uint64_t> divisors(std::uint64_t n) const;  // sorted
};

SieveTable build_sieve(std::uint64_t limit);

// Ramanujan sum c_q(n) = mu(q/(q,n)) phi(q) / phi(q/(q,n)).
std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t n);

// Defining exponential sum over residues coprime to q; the oracle for
// ramanujan_sum.
cplx ramanujan_sum_direct(std::uint64_t q, std::int64_t n);

// Kloosterman sum K(n,m;q) = sum_{r=1}^{q-1} e((n r + m rbar)/q), q prime.
// The r <-> rbar pairing makes the sum exactly real; an imaginary part
// above 1e-9 signals an inverse-table bug and throws.
double kloosterman(std::int64_t n, std::int64_t m, std::uint64_t q);

// All Dirichlet characters modulo an odd prime q. With g a fixed primitive
// root and ind(g^k) = k, chi_j(a) = e(j ind(a)/(q-1)). Values are kept as
// exponent residues so orthogonality can be tested through exact integer
// arithmetic.
struct CharacterTable {
  std::uint32_t q = 0;
  std::uint32_t generator = 0;
  std::uint32_t order = 0;           // q - 1
  std::vector<std::uint32_t> index;  // index[a], a = 1..q-1
  std::vector<cplx> roots;           // e(k/(q-1)), k = 0..q-2

  // j * ind(a) mod (q-1); requires a coprime to q
  std::uint32_t exponent(std::uint32_t j, std::uint64_t a) const;
  cplx chi(std::uint32_t j, std::int64_t a) const;  // 0 when q | a
  std::uint32_t conj_index(std::uint32_t j) const { return j == 0 ? 0 : order - j; }
  bool is_principal(std::uint32_t j) const { return j == 0; }
  bool is_even(std::uint32_t j) const { return j % 2 == 0; }  // chi(-1) = +1
};

CharacterTable build_characters(std::uint32_t q);

}  // namespace d3ap
