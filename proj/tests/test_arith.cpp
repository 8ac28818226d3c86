#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "doctest.h"

#include "d3ap/arith.hpp"
#include "d3ap/sieve_cache.hpp"
#include "test_support.hpp"

using namespace d3ap;

TEST_CASE("build_sieve identity case") {
  SieveTable t = build_sieve(1);
  CHECK(t.d3[1] == 1);
  CHECK(t.mu[1] == 1);
  CHECK(t.phi[1] == 1);
  CHECK_THROWS_AS(build_sieve(0), std::invalid_argument);
}

TEST_CASE("d3 prime power and multiplicativity") {
  const SieveTable& t = d3ap_test::sieve();
  CHECK(t.d3[8] == 10);  // (3+1)(3+2)/2

  // brute-force enumeration of ordered triples with product 12
  int count = 0;
  for (int a = 1; a <= 12; ++a)
    for (int b = 1; b <= 12; ++b)
      for (int c = 1; c <= 12; ++c)
        if (a * b * c == 12) ++count;
  CHECK(count == 18);
  CHECK(t.d3[12] == 18);
  CHECK(t.d3[12] == t.d3[4] * t.d3[3]);
}

TEST_CASE("d3 against the divisor-convolution oracle") {
  const SieveTable& t = d3ap_test::sieve();
  // d3 = 1 * 1 * 1 via two convolution passes
  const std::uint64_t X = 20000;
  std::vector<std::uint32_t> d2(X + 1, 0), d3o(X + 1, 0);
  for (std::uint64_t d = 1; d <= X; ++d)
    for (std::uint64_t n = d; n <= X; n += d) d2[n] += 1;
  for (std::uint64_t d = 1; d <= X; ++d)
    for (std::uint64_t n = d; n <= X; n += d) d3o[n] += d2[d];
  for (std::uint64_t n = 1; n <= X; ++n) REQUIRE(t.d3[n] == d3o[n]);
}

TEST_CASE("phi divisor sum and mu definition") {
  const SieveTable& t = d3ap_test::sieve();
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    std::uint64_t s = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
      if (n % d) continue;
      s += t.phi[d];
      if (d != n / d) s += t.phi[n / d];
    }
    REQUIRE(s == n);
  }
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    auto fac = t.factor(n);
    bool squarefree = true;
    for (const auto& pp : fac)
      if (pp.a > 1) squarefree = false;
    if (!squarefree) {
      REQUIRE(t.mu[n] == 0);
    } else {
      REQUIRE(t.mu[n] == (fac.size() % 2 == 0 ? 1 : -1));
    }
  }
}

TEST_CASE("sieve restriction consistency") {
  SieveTable big = build_sieve(1000);
  SieveTable small = build_sieve(437);
  for (std::uint64_t n = 1; n <= 437; ++n) {
    REQUIRE(big.d3[n] == small.d3[n]);
    REQUIRE(big.mu[n] == small.mu[n]);
    REQUIRE(big.phi[n] == small.phi[n]);
    REQUIRE(big.spf[n] == small.spf[n]);
  }
}

TEST_CASE("ramanujan sum examples and formula") {
  CHECK(ramanujan_sum(6, 5) == 1);   // (n,q)=1 -> mu(6)
  CHECK(ramanujan_sum(6, 0) == 2);   // phi(6)
  CHECK(ramanujan_sum(6, 2) == -1);  // e(2/6)+e(10/6)
  CHECK(ramanujan_sum(1, 7) == 1);
  CHECK_THROWS_AS(ramanujan_sum(0, 1), std::invalid_argument);

  for (std::uint64_t q = 1; q <= 50; ++q) {
    for (std::int64_t n = -5; n <= 50; ++n) {
      cplx direct = ramanujan_sum_direct(q, n);
      REQUIRE(std::abs(direct.imag()) < 1e-9);
      REQUIRE(std::abs(direct.real() - static_cast<double>(ramanujan_sum(q, n))) < 1e-9);
    }
  }
}

TEST_CASE("ramanujan sum prime form") {
  for (std::uint64_t q : primes_in_range(2, 60)) {
    for (std::int64_t n = 1; n <= 30; ++n) {
      std::int64_t want =
          (n % static_cast<std::int64_t>(q) == 0) ? static_cast<std::int64_t>(q - 1) : -1;
      REQUIRE(ramanujan_sum(q, n) == want);
    }
  }
}

TEST_CASE("kloosterman examples") {
  CHECK(kloosterman(0, 0, 7) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-12));
  // 2 + 2 cos(4 pi / 5)
  CHECK(kloosterman(1, 1, 5) ==
        doctest::Approx(2.0 + 2.0 * std::cos(4.0 * std::numbers::pi / 5.0)).epsilon(1e-9));
  CHECK(kloosterman(1, 1, 5) == doctest::Approx(0.3819660).epsilon(1e-6));
  CHECK_THROWS_AS(kloosterman(1, 1, 6), std::invalid_argument);
}

TEST_CASE("kloosterman symmetry and Weil sanity") {
  for (std::uint64_t q : {2, 3, 5, 7, 11, 13, 17}) {
    for (std::int64_t n = 0; n < static_cast<std::int64_t>(q); ++n) {
      for (std::int64_t m = 0; m < static_cast<std::int64_t>(q); ++m) {
        double k1 = kloosterman(n, m, q);
        double k2 = kloosterman(m, n, q);
        REQUIRE(k1 == doctest::Approx(k2).epsilon(1e-10));
        if (n != 0 || m != 0) {
          REQUIRE(std::abs(k1) <= 2.0 * std::sqrt(static_cast<double>(q)) + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("character table q=3 and q=5") {
  CharacterTable t3 = build_characters(3);
  CHECK(t3.order == 2);
  CHECK(t3.chi(1, 2).real() == doctest::Approx(-1.0));
  CHECK(std::abs(t3.chi(1, 2).imag()) < 1e-12);
  CHECK(t3.chi(1, 3) == cplx(0.0, 0.0));

  CharacterTable t5 = build_characters(5);
  for (int a = 1; a <= 4; ++a) {
    CHECK(t5.chi(0, a).real() == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(t5.chi(1, a)) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(build_characters(2), std::invalid_argument);
  CHECK_THROWS_AS(build_characters(9), std::invalid_argument);
}

TEST_CASE("character orthogonality q=7 via exact exponents") {
  CharacterTable t = build_characters(7);
  for (std::uint32_t j = 0; j < t.order; ++j) {
    for (std::uint32_t k = 0; k < t.order; ++k) {
      // sum over units of e((j-k) ind(a) / (q-1)) as exact exponent counts
      cplx s = 0.0;
      for (std::uint32_t a = 1; a < 7; ++a) s += t.chi(j, a) * std::conj(t.chi(k, a));
      double want = (j == k) ? 6.0 : 0.0;
      REQUIRE(std::abs(s - want) < 1e-12);
    }
  }
}

TEST_CASE("character multiplicativity") {
  CharacterTable t = build_characters(11);
  for (std::uint32_t j : {1u, 3u, 7u}) {
    for (int a = 1; a <= 10; ++a) {
      for (int b = 1; b <= 10; ++b) {
        cplx lhs = t.chi(j, a * b);
        cplx rhs = t.chi(j, a) * t.chi(j, b);
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("sieve cache round trip and corruption handling") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "d3ap_cache_test";
  fs::create_directories(dir);

  SieveTable t = build_sieve(5000);
  fs::path file = sieve_cache_path(dir, 5000);
  save_sieve(t, file);

  auto loaded = load_sieve(file, 5000);
  REQUIRE(loaded.has_value());
  CHECK(loaded->d3 == t.d3);
  CHECK(loaded->mu == t.mu);
  CHECK(loaded->phi == t.phi);
  CHECK(loaded->spf == t.spf);

  // wrong limit is rejected
  CHECK_FALSE(load_sieve(file, 4000).has_value());

  // corrupt magic -> rebuilt, not trusted
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_FALSE(load_sieve(file, 5000).has_value());
  CachedSieve cached = load_or_build_sieve(5000, dir);
  CHECK_FALSE(cached.from_cache);
  CHECK(cached.table.d3 == t.d3);

  // second load hits the rewritten cache
  CachedSieve cached2 = load_or_build_sieve(5000, dir);
  CHECK(cached2.from_cache);

  // truncated file is rejected
  fs::resize_file(file, fs::file_size(file) - 17);
  CHECK_FALSE(load_sieve(file, 5000).has_value());

  fs::remove_all(dir);
}
