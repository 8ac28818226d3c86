#include <cmath>
#include <numbers>

#include "doctest.h"

#include "d3ap/lfunctions.hpp"
#include "d3ap/quadrature.hpp"
#include "d3ap/zeta.hpp"

using namespace d3ap;

TEST_CASE("hurwitz zeta classical values") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(hurwitz_zeta(cplx(2.0, 0.0), 1.0) - cplx(pi2 / 6.0, 0.0)) < 1e-10);
  CHECK(std::abs(hurwitz_zeta(cplx(2.0, 0.0), 0.5) - cplx(pi2 / 2.0, 0.0)) < 1e-10);

  // direct series oracle for zeta(2, 1/2)
  double direct = 0.0;
  for (int n = 400000; n >= 0; --n) direct += 1.0 / ((n + 0.5) * (n + 0.5));
  CHECK(hurwitz_zeta(cplx(2.0, 0.0), 0.5).real() == doctest::Approx(direct).epsilon(1e-6));

  CHECK_THROWS_AS(hurwitz_zeta(cplx(1.0, 0.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hurwitz_zeta(cplx(2.0, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("hurwitz zeta defining recursion") {
  for (cplx s : {cplx(0.5, 3.0), cplx(0.5, 30.0), cplx(2.0, -7.0), cplx(-0.5, 5.0)}) {
    for (double a : {0.2, 0.5, 0.9}) {
      cplx lhs = hurwitz_zeta(s, a);
      cplx rhs = hurwitz_zeta(s, a + 1.0) + std::exp(-s * std::log(a));
      REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("riemann zeta spot values") {
  CHECK(std::abs(riemann_zeta(cplx(2.0, 0.0)).real() - std::numbers::pi * std::numbers::pi / 6.0) <
        1e-12);
  // zeta(1/2) = -1.4603545088...
  CHECK(riemann_zeta(cplx(0.5, 0.0)).real() == doctest::Approx(-1.4603545088).epsilon(1e-9));
}

TEST_CASE("L-value at s=2 for the character mod 3") {
  CharacterTable t3 = build_characters(3);
  LEvaluator ev{&t3, 1};
  // direct convergent series
  cplx direct = 0.0;
  for (int n = 1; n <= 2000000; ++n) {
    int r = n % 3;
    if (r == 0) continue;
    double term = 1.0 / (static_cast<double>(n) * n);
    direct += (r == 1 ? term : -term);
  }
  CHECK(std::abs(ev.value(cplx(2.0, 0.0)) - direct) < 1e-8);
}

TEST_CASE("L-value reflection and conjugate symmetry") {
  CharacterTable t5 = build_characters(5);
  for (std::uint32_t j = 1; j < 4; ++j) {
    LEvaluator ev{&t5, j};
    LEvaluator evc{&t5, t5.conj_index(j)};
    for (cplx s : {cplx(0.5, 2.0), cplx(0.5, 11.0), cplx(1.5, -3.0)}) {
      cplx a = ev.value(s);
      cplx b = evc.value(std::conj(s));
      REQUIRE(std::abs(b - std::conj(a)) < 1e-9 * (1.0 + std::abs(a)));
    }
    // |L(1/2, chi)| finite and equal under conjugation
    double m1 = std::abs(ev.value(cplx(0.5, 0.0)));
    double m2 = std::abs(evc.value(cplx(0.5, 0.0)));
    REQUIRE(std::isfinite(m1));
    REQUIRE(m1 == doctest::Approx(m2).epsilon(1e-10));
  }
}

TEST_CASE("principal character guarded below Re(s) = 1") {
  CharacterTable t5 = build_characters(5);
  LEvaluator ev{&t5, 0};
  CHECK_THROWS_AS(ev.value(cplx(0.5, 1.0)), std::invalid_argument);
  // Re(s) > 1: L(s, chi0) = zeta(s)(1 - q^{-s})
  cplx got = ev.value(cplx(2.0, 0.0));
  cplx want = riemann_zeta(cplx(2.0, 0.0)) * (1.0 - std::pow(5.0, -2.0));
  CHECK(std::abs(got - want) < 1e-10);
}

TEST_CASE("dual-route L-values agree on the standard grid") {
  for (std::uint32_t q : {3, 5, 7}) {
    CharacterTable table = build_characters(q);
    for (std::uint32_t j = 1; j < table.order; ++j) {
      LEvaluator ev{&table, j};
      for (double t : {0.0, 2.5, 10.0}) {
        cplx s(0.5, t);
        cplx a = ev.value(s);
        cplx b = ev.value_smoothed(s, 3e5);
        REQUIRE(std::abs(a - b) < 1e-6 * (1.0 + std::abs(a)));
      }
    }
  }
}

TEST_CASE("moment integral basics") {
  CharacterTable t3 = build_characters(3);
  LEvaluator ev{&t3, 1};

  // empty interval
  MomentResult zero = moment_integral(ev, 2, 5.0, 5.0);
  CHECK(zero.value == 0.0);

  // interval additivity
  MomentResult whole = moment_integral(ev, 2, 1.0, 10.0, 1e-7);
  MomentResult left = moment_integral(ev, 2, 1.0, 5.0, 1e-7);
  MomentResult right = moment_integral(ev, 2, 5.0, 10.0, 1e-7);
  CHECK(whole.value == doctest::Approx(left.value + right.value).epsilon(1e-7));

  CHECK_THROWS_AS(moment_integral(ev, 5, 1.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(moment_integral(ev, 2, 0.5, 10.0), std::invalid_argument);
}

TEST_CASE("dual quadrature schemes agree") {
  CharacterTable t3 = build_characters(3);
  LEvaluator ev{&t3, 1};
  MomentResult panels = moment_integral(ev, 2, 1.0, 10.0, 1e-7);
  auto f = [&](double t) { return cplx(critical_modulus_sym(ev, 2, t) / t, 0.0); };
  QuadResult simpson = integrate_adaptive_simpson(f, 1.0, 10.0, 1e-8);
  CHECK(panels.value == doctest::Approx(simpson.value.real()).epsilon(1e-6));
}

TEST_CASE("moment report pairing and aggregates") {
  CharacterTable t13 = build_characters(13);
  MomentReport rep = compute_moment_report(t13, 1.0, 10.0);
  REQUIRE(rep.per_char.size() == 11);
  for (const auto& pc : rep.per_char) {
    std::uint32_t jc = t13.conj_index(pc.j);
    const auto& mirror = rep.per_char[jc - 1];
    REQUIRE(pc.I2 == mirror.I2);
    REQUIRE(pc.I3 == mirror.I3);
    REQUIRE(pc.I4 == mirror.I4);
    REQUIRE(pc.I2 >= 0.0);
    REQUIRE(pc.I3 >= 0.0);
    REQUIRE(pc.I4 >= 0.0);
  }
  double s4 = 0.0, s3 = 0.0;
  for (const auto& pc : rep.per_char) {
    s4 += pc.I4;
    s3 += pc.I3 * pc.I3;
  }
  CHECK(rep.sum_I4 == doctest::Approx(s4).epsilon(1e-12));
  CHECK(rep.sum_I3_sq == doctest::Approx(s3).epsilon(1e-12));
}

TEST_CASE("lemma 7 structure at q=3 and monotonicity in T") {
  CharacterTable t3 = build_characters(3);
  // single conjugate-closed nonprincipal character: one integral squared
  LEvaluator ev{&t3, 1};
  MomentResult i3 = moment_integral(ev, 3, 1.0, 10.0, 1e-6);
  double lhs = lemma7_lhs(t3, 10.0);
  CHECK(lhs == doctest::Approx(i3.value * i3.value).epsilon(1e-5));

  CHECK(lemma7_lhs(t3, 20.0) >= lhs * (1.0 - 1e-10));
  CHECK(fourth_moment_sum(t3, 1.0) == 0.0);
}

TEST_CASE("proof inequalities: Cauchy-Schwarz and dyadic splitting") {
  for (std::uint32_t q : {3, 5, 7, 11, 13}) {
    CharacterTable table = build_characters(q);
    MomentReport rep = compute_moment_report(table, 1.0, 10.0);
    double cs_rhs = 0.0;
    for (const auto& pc : rep.per_char) cs_rhs += pc.I2 * pc.I4;
    CHECK(rep.sum_I3_sq <= cs_rhs * (1.0 + 1e-9));

    // dyadic splitting: int_y^T |L|^2/t dt <= (log2(T/y)+1) max_U (1/U) int_U^{2U} |L|^2 dt
    const double y = 1.0, T = 10.0;
    for (std::uint32_t j = 1; j < table.order; ++j) {
      LEvaluator ev{&table, j};
      double lhs = moment_integral(ev, 2, y, T, 1e-6).value;
      double blocks = std::floor(std::log2(T / y)) + 1.0;
      double best = 0.0;
      for (double U = y; U < T; U *= 2.0) {
        auto f = [&](double t) { return cplx(critical_modulus_sym(ev, 2, t), 0.0); };
        QuadResult block = integrate_adaptive_simpson(f, U, 2.0 * U, 1e-8);
        best = std::max(best, block.value.real() / U);
      }
      REQUIRE(lhs <= blocks * best * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("subconvexity ratio scan") {
  CharacterTable t7 = build_characters(7);
  std::vector<double> grid{1.0, 2.0, 5.0, 10.0, 20.0};
  SubconvexityScan scan = subconvexity_ratio_scan(t7, grid);
  CHECK(scan.max_ratio >= 0.0);
  CHECK(scan.argmax_j >= 1);

  // per-character ratios are invariant under conjugation (max over +-t)
  for (std::uint32_t j = 1; j < t7.order; ++j) {
    LEvaluator ev{&t7, j};
    LEvaluator evc{&t7, t7.conj_index(j)};
    for (double t : grid) {
      double a = std::max(std::abs(ev.value(cplx(0.5, t))), std::abs(ev.value(cplx(0.5, -t))));
      double b = std::max(std::abs(evc.value(cplx(0.5, t))), std::abs(evc.value(cplx(0.5, -t))));
      REQUIRE(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("moment report json shape") {
  CharacterTable t5 = build_characters(5);
  MomentReport rep = compute_moment_report(t5, 1.0, 5.0);
  std::string js = moment_report_to_json(rep);
  CHECK(js.find("\"per_char\"") != std::string::npos);
  CHECK(js.find("\"I3_sq_sum\"") != std::string::npos);
  CHECK(js.find("\"q\": 5") != std::string::npos);
}
