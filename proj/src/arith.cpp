#include "d3ap/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d3ap/kahan.hpp"

namespace d3ap {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  if (n % 3 == 0) return n == 3;
  for (std::uint64_t p = 5; p * p <= n; p += 6) {
    if (n % p == 0 || n % (p + 2) == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  if (mod == 0) throw std::invalid_argument("pow_mod: zero modulus");
  unsigned __int128 acc = 1;
  unsigned __int128 b = base % mod;
  while (exp) {
    if (exp & 1) acc = acc * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) throw std::invalid_argument("inv_mod_prime: a divisible by p");
  return pow_mod(a, p - 2, p);
}

std::vector<PrimePower> factor_u64(std::uint64_t n) {
  std::vector<PrimePower> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    std::uint32_t a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    out.push_back({p, a});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

int mobius_u64(std::uint64_t n) {
  int m = 1;
  for (const auto& pp : factor_u64(n)) {
    if (pp.a > 1) return 0;
    m = -m;
  }
  return m;
}

std::uint64_t euler_phi_u64(std::uint64_t n) {
  std::uint64_t phi = 1;
  for (const auto& pp : factor_u64(n)) {
    std::uint64_t pk = 1;
    for (std::uint32_t i = 1; i < pp.a; ++i) pk *= pp.p;
    phi *= pk * (pp.p - 1);
  }
  return phi;
}

SieveTable build_sieve(std::uint64_t limit) {
  if (limit == 0) throw std::invalid_argument("build_sieve: limit must be >= 1");
  if (limit >= (std::uint64_t(1) << 32))
    throw std::length_error("build_sieve: limit too large for 32-bit spf table");

  SieveTable t;
  t.limit = limit;
  try {
    t.d3.assign(limit + 1, 0);
    t.mu.assign(limit + 1, 0);
    t.phi.assign(limit + 1, 0);
    t.spf.assign(limit + 1, 0);
  } catch (const std::bad_alloc&) {
    throw std::runtime_error("build_sieve: allocation failed for limit " + std::to_string(limit));
  }

  t.d3[1] = 1;
  t.mu[1] = 1;
  t.phi[1] = 1;
  t.spf[1] = 1;
  if (limit == 1) return t;

  // Linear sieve; cnt[i] is the exponent of spf(i) in i, so that
  // d3(p * i) follows from d3(p^a) = (a+1)(a+2)/2.
  std::vector<std::uint8_t> cnt(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  primes.reserve(static_cast<std::size_t>(1.3 * limit / std::log(static_cast<double>(limit) + 2) + 16));

  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (t.spf[i] == 0) {
      t.spf[i] = static_cast<std::uint32_t>(i);
      t.phi[i] = i - 1;
      t.mu[i] = -1;
      t.d3[i] = 3;
      cnt[i] = 1;
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > t.spf[i]) break;
      std::uint64_t ip = static_cast<std::uint64_t>(p) * i;
      if (ip > limit) break;
      t.spf[ip] = p;
      if (p == t.spf[i]) {
        std::uint32_t a = cnt[i];
        cnt[ip] = static_cast<std::uint8_t>(a + 1);
        t.phi[ip] = t.phi[i] * p;
        t.mu[ip] = 0;
        t.d3[ip] = t.d3[i] / ((a + 1) * (a + 2) / 2) * ((a + 2) * (a + 3) / 2);
        break;
      }
      cnt[ip] = 1;
      t.phi[ip] = t.phi[i] * (p - 1);
      t.mu[ip] = static_cast<std::int8_t>(-t.mu[i]);
      t.d3[ip] = t.d3[i] * 3;
    }
  }
  return t;
}

std::vector<PrimePower> SieveTable::factor(std::uint64_t n) const {
  if (n == 0 || n > limit) throw std::out_of_range("SieveTable::factor: n outside table");
  std::vector<PrimePower> out;
  while (n > 1) {
    std::uint64_t p = spf[n];
    std::uint32_t a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    out.push_back({p, a});
  }
  return out;
}

std::vector<std::uint64_t> SieveTable::divisors(std::uint64_t n) const {
  std::vector<std::uint64_t> divs{1};
  for (const auto& pp : factor(n)) {
    std::size_t m = divs.size();
    std::uint64_t pk = 1;
    for (std::uint32_t e = 1; e <= pp.a; ++e) {
      pk *= pp.p;
      for (std::size_t i = 0; i < m; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t n) {
  if (q == 0) throw std::invalid_argument("ramanujan_sum: q must be positive");
  std::int64_t qi = static_cast<std::int64_t>(q);
  std::uint64_t r = static_cast<std::uint64_t>(((n % qi) + qi) % qi);
  std::uint64_t g = std::gcd(q, r);  // gcd(q, 0) = q
  std::uint64_t k = q / g;
  int mu_k = mobius_u64(k);
  if (mu_k == 0) return 0;
  return mu_k * static_cast<std::int64_t>(euler_phi_u64(q) / euler_phi_u64(k));
}

cplx ramanujan_sum_direct(std::uint64_t q, std::int64_t n) {
  if (q == 0) throw std::invalid_argument("ramanujan_sum_direct: q must be positive");
  std::int64_t qi = static_cast<std::int64_t>(q);
  std::uint64_t r = static_cast<std::uint64_t>(((n % qi) + qi) % qi);
  std::vector<cplx> root(q);
  for (std::uint64_t k = 0; k < q; ++k) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
    root[k] = {std::cos(ang), std::sin(ang)};
  }
  KahanCSum acc;
  for (std::uint64_t m = 1; m <= q; ++m) {
    if (std::gcd(m, q) != 1) continue;
    acc.add(root[m * r % q]);
  }
  return acc.value();
}

double kloosterman(std::int64_t n, std::int64_t m, std::uint64_t q) {
  if (!is_prime(q)) throw std::invalid_argument("kloosterman: q must be prime");
  if (q > (std::uint64_t(1) << 26))
    throw std::length_error("kloosterman: q too large for the table-based evaluation");
  std::int64_t qi = static_cast<std::int64_t>(q);
  std::uint64_t nr = static_cast<std::uint64_t>(((n % qi) + qi) % qi);
  std::uint64_t mr = static_cast<std::uint64_t>(((m % qi) + qi) % qi);

  std::vector<cplx> root(q);
  for (std::uint64_t k = 0; k < q; ++k) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
    root[k] = {std::cos(ang), std::sin(ang)};
  }
  // inv[r] by the classic linear recurrence, valid for prime q
  std::vector<std::uint32_t> inv(q, 0);
  if (q > 1) inv[1] = 1;
  for (std::uint64_t r = 2; r < q; ++r)
    inv[r] = static_cast<std::uint32_t>((q - q / r) * inv[q % r] % q);

  KahanCSum acc;
  for (std::uint64_t r = 1; r < q; ++r) {
    acc.add(root[(nr * r + mr * inv[r]) % q]);
  }
  cplx s = acc.value();
  if (std::abs(s.imag()) >= 1e-9)
    throw std::runtime_error("kloosterman: non-real sum (inverse-table bug?)");
  return s.real();
}

std::uint32_t CharacterTable::exponent(std::uint32_t j, std::uint64_t a) const {
  std::uint64_t am = a % q;
  if (am == 0) throw std::invalid_argument("CharacterTable::exponent: a not coprime to q");
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(j) * index[am] % order);
}

cplx CharacterTable::chi(std::uint32_t j, std::int64_t a) const {
  std::int64_t qi = static_cast<std::int64_t>(q);
  std::uint64_t am = static_cast<std::uint64_t>(((a % qi) + qi) % qi);
  if (am == 0) return {0.0, 0.0};
  return roots[static_cast<std::uint64_t>(j) * index[am] % order];
}

CharacterTable build_characters(std::uint32_t q) {
  if (q == 2) throw std::invalid_argument("build_characters: q = 2 has a trivial group; callers must special-case");
  if (q < 3 || !is_prime(q)) throw std::invalid_argument("build_characters: q must be an odd prime");

  CharacterTable t;
  t.q = q;
  t.order = q - 1;

  auto fac = factor_u64(t.order);
  std::uint32_t g = 2;
  for (;; ++g) {
    bool primitive = true;
    for (const auto& pp : fac) {
      if (pow_mod(g, t.order / pp.p, q) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) break;
  }
  t.generator = g;

  t.index.assign(q, 0);
  std::uint64_t cur = 1;
  for (std::uint32_t k = 0; k < t.order; ++k) {
    t.index[cur] = k;
    cur = cur * g % q;
  }

  t.roots.resize(t.order);
  for (std::uint32_t k = 0; k < t.order; ++k) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(t.order);
    t.roots[k] = {std::cos(ang), std::sin(ang)};
  }
  return t;
}

}  // namespace d3ap
