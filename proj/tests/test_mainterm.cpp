#include <cmath>
#include <numbers>

#include "doctest.h"

#include "d3ap/expsum.hpp"
#include "d3ap/kahan.hpp"
#include "d3ap/mainterm.hpp"
#include "d3ap/zeta.hpp"
#include "test_support.hpp"

using namespace d3ap;

TEST_CASE("theta examples") {
  for (std::uint64_t n : {1ull, 2ull, 17ull}) {
    Rational t = theta(n, 1);
    CHECK(t.num == 1);
    CHECK(t.den == 1);
  }
  Rational t1 = theta(6, 3);  // q | n -> 1
  CHECK(t1.num == 1);
  CHECK(t1.den == 1);
  Rational t2 = theta(2, 3);  // mu(3)/phi(3) = -1/2
  CHECK(t2.num == -1);
  CHECK(t2.den == 2);
  Rational t3 = theta(3, 12);  // 12/(12,3) = 4, mu(4) = 0
  CHECK(t3.num == 0);
}

TEST_CASE("dirichlet series factor closed form") {
  CHECK(dirichlet_series_factor(1, cplx(1.0, 0.0)) == cplx(1.0, 0.0));
  // d=2, s=1: [2(1 - (1/2)^3) - 1]/1 = 3/4
  CHECK(dirichlet_series_factor(2, cplx(1.0, 0.0)).real() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(dirichlet_series_factor(6, cplx(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("dirichlet series factor against the truncated direct series") {
  const SieveTable& sv = d3ap_test::sieve();
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  const double zeta2_cubed = zeta2 * zeta2 * zeta2;
  for (std::uint64_t d : {2, 3, 7}) {
    // sum d3(n) theta_n(d) / n^2 with theta_n(d) = 1 if d|n else -1/(d-1)
    KahanSum acc;
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
      double th = (n % d == 0) ? 1.0 : -1.0 / static_cast<double>(d - 1);
      acc.add(sv.d3[n] * th / (static_cast<double>(n) * static_cast<double>(n)));
    }
    double got = acc.value() / zeta2_cubed;
    double want = dirichlet_series_factor(d, cplx(2.0, 0.0)).real();
    REQUIRE(std::abs(got - want) < 1e-4 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("F_x sign and monotonicity") {
  CHECK(F_x(1, 2.0) > 0.0);
  for (std::uint64_t d : {1, 7}) {
    double prev = F_x(d, 10.0);
    for (double x : {20.0, 50.0, 130.0, 400.0, 1500.0, 9000.0}) {
      double cur = F_x(d, x);
      REQUIRE(cur > prev);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(F_x(1, 1.0), std::invalid_argument);
}

TEST_CASE("Taylor residue against the contour oracle") {
  for (std::uint64_t d : {1, 2, 31, 101}) {
    for (double x : {5.0, 50.0, 500.0, 5000.0, 50000.0}) {
      double taylor = F_x(d, x);
      double contour = F_x_contour(d, x);
      REQUIRE(std::abs(taylor - contour) < 1e-8 * std::max(1.0, std::abs(contour)));
    }
  }
}

TEST_CASE("contour oracle is radius-insensitive") {
  double a = F_x_contour(3, 100.0, 64, 0.1);
  double b = F_x_contour(3, 100.0, 96, 0.22);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("F_x(1) approximates the window sum of d3") {
  const SieveTable& sv = d3ap_test::sieve();
  const double x = 1000000.0;
  std::int64_t window = 0;
  for (std::uint64_t n = 1000001; n <= 2000000; ++n) window += sv.d3[n];
  double f = F_x(1, x);
  CHECK(std::abs(f - static_cast<double>(window)) / f < 0.01);
}

TEST_CASE("doubling consistency of the residue window") {
  for (std::uint64_t d : {1, 5}) {
    for (double x : {10.0, 300.0, 12000.0}) {
      double joined = residue_window_main(d, x, 4.0 * x);
      double split = F_x(d, x) + F_x(d, 2.0 * x);
      REQUIRE(std::abs(joined - split) < 1e-12 * std::max(1.0, std::abs(joined)));
    }
  }
}

TEST_CASE("main term and error decomposition") {
  const SieveTable& sv = d3ap_test::sieve();
  const double x = 10000.0;
  const std::uint64_t q = 7;
  APCounts counts = ap_counts(sv, x, q);
  MainTermModel model = MainTermModel::build(x, q);
  ClassDecomp d = main_and_error(counts, model);

  // sum_a M = F_x(1) since sum_a c_q(a) = 0
  KahanSum sm;
  for (std::uint64_t a = 1; a <= q; ++a) sm.add(d.M[a]);
  CHECK(std::abs(sm.value() - model.F1) < 1e-12 * model.F1);

  // sum_a E = counts - F_x(1)
  KahanSum se;
  for (std::uint64_t a = 1; a <= q; ++a) se.add(d.E[a]);
  double want = static_cast<double>(counts.total()) - model.F1;
  CHECK(se.value() == doctest::Approx(want).epsilon(1e-9));

  // Parseval: sum_a E^2 = (1/q) sum_r |Delta|^2
  ResidueSpectrum s = delta_spectrum(counts, model);
  CHECK(d.sum_E_sq() ==
        doctest::Approx(s.sum_delta_sq() / static_cast<double>(q)).epsilon(1e-9));
}

TEST_CASE("theorem 2 report") {
  const SieveTable& sv = d3ap_test::sieve();

  // all E = 0 on a synthetic zero model
  {
    MainTermModel zero;
    zero.x = 4.0;
    zero.q = 3;
    APCounts empty;
    empty.q = 3;
    empty.x = 4.0;
    empty.counts.assign(4, 0);
    auto spec = delta_spectrum(empty, zero);
    auto decomp = main_and_error(empty, zero);
    auto rep = theorem2_check(spec, decomp);
    CHECK(rep.sum_abs_E == 0.0);
    CHECK(rep.sqrt_sum_delta_sq == 0.0);
    CHECK(rep.cauchy_schwarz_ok);
  }

  // real data: the chain holds
  {
    const double x = 10000.0;
    const std::uint64_t q = 11;
    APCounts counts = ap_counts(sv, x, q);
    MainTermModel model = MainTermModel::build(x, q);
    auto spec = delta_spectrum(counts, model);
    auto decomp = main_and_error(counts, model);
    auto rep = theorem2_check(spec, decomp);
    CHECK(rep.cauchy_schwarz_ok);
    CHECK(rep.parseval_rel_err < 1e-9);
    CHECK(rep.sum_abs_E <= rep.sqrt_energy * (1.0 + 1e-12));
  }

  // constant |E|: equality case of Cauchy-Schwarz
  {
    MainTermModel zero;
    zero.x = 4.0;
    zero.q = 5;
    APCounts synth;
    synth.q = 5;
    synth.x = 4.0;
    synth.counts.assign(6, 3);  // every class count 3, F == 0 -> E == 3
    auto spec = delta_spectrum(synth, zero);
    auto decomp = main_and_error(synth, zero);
    auto rep = theorem2_check(spec, decomp);
    CHECK(rep.sum_abs_E == doctest::Approx(rep.sqrt_energy).epsilon(1e-12));
  }
}

TEST_CASE("meromorphic-part consequence: F_x(q) stays within C x log^2(2x)/q") {
  double C = 0.0;
  for (std::uint64_t q : {3, 7, 31, 101, 499}) {
    for (double x : {100.0, 1000.0, 10000.0, 100000.0}) {
      double shape = x * std::log(2.0 * x) * std::log(2.0 * x) / static_cast<double>(q);
      C = std::max(C, std::abs(F_x(q, x)) / shape);
    }
  }
  CHECK(C < 10.0);  // fitted constant stays O(1) on the grid
}
