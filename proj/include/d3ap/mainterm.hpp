#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "d3ap/expsum.hpp"
#include "d3ap/zeta.hpp"

namespace d3ap {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// theta_n(q) = mu(q/(q,n)) / phi(q/(q,n)), exact.
Rational theta(std::uint64_t n, std::uint64_t q);

// G_d(s) with sum_n d3(n) theta_n(d) n^{-s} = zeta(s)^3 G_d(s); G_1 = 1 and
// G_d(s) = [d (1 - (1 - d^{-s})^3) - 1] / (d - 1) for prime d. Entire near
// s = 1.
cplx dirichlet_series_factor(std::uint64_t d, cplx s);

// Res_{s=1} zeta(s)^3 G_d(s) (x2^s - x1^s)/s via order-2 Taylor data of the
// analytic part against the triple pole.
double residue_window_main(std::uint64_t d, double x1, double x2);

// F_x(d): the (x, 2x] window.
double F_x(std::uint64_t d, double x);

// Independent oracle: small-circle contour integral around s = 1
// (trapezoid rule; zeta by Euler-Maclaurin).
double F_x_contour(std::uint64_t d, double x, int nodes = 64, double radius = 0.1);

// Laurent/Taylor data producing F_x(d), M_x(q,a), E_x(q,a) for one (x, q).
struct MainTermModel {
  double x = 0.0;
  std::uint64_t q = 0;
  double gamma0 = kEulerGamma;
  double gamma1 = kStieltjesGamma1;
  double F1 = 0.0;                    // F_x(1)
  double Fq = 0.0;                    // F_x(q)
  std::array<double, 3> jet1{};       // Taylor data behind F1
  std::array<double, 3> jetq{};       // Taylor data behind Fq

  static MainTermModel build(double x, std::uint64_t q);
};

// M_x(q,a) = (1/q) sum_{d|q} c_d(a) F_x(d) and E_x(q,a) = count - M, a = 1..q.
struct ClassDecomp {
  std::uint64_t q = 0;
  double x = 0.0;
  std::vector<double> M;  // [1..q]
  std::vector<double> E;  // [1..q]

  double sum_E_sq() const;
  double sum_abs_E() const;
};

ClassDecomp main_and_error(const APCounts& counts, const MainTermModel& model);

struct Theorem2Report {
  double sum_abs_E = 0.0;        // sum_a |E_x(q,a)|
  double sqrt_energy = 0.0;      // sqrt(q sum_a E^2) = sqrt(sum_r |Delta|^2)
  double sqrt_sum_delta_sq = 0.0;
  bool cauchy_schwarz_ok = false;
  double parseval_rel_err = 0.0;
};

Theorem2Report theorem2_check(const ResidueSpectrum& spectrum, const ClassDecomp& decomp);

// errors_x{X}_q{Q}.csv with columns a, count, M, E.
std::filesystem::path write_errors_csv(const APCounts& counts, const ClassDecomp& decomp,
                                       const std::filesystem::path& dir);

}  // namespace d3ap
