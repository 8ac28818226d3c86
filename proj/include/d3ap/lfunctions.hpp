#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d3ap/arith.hpp"
#include "d3ap/zeta.hpp"

namespace d3ap {

// Dirichlet L-values through the finite Hurwitz combination
// L(s, chi) = q^{-s} sum_{a=1}^{q-1} chi(a) zeta(s, a/q).
struct LEvaluator {
  const CharacterTable* table = nullptr;
  std::uint32_t j = 0;  // character index
  HurwitzSettings hurwitz{};

  cplx value(cplx s) const;

  // Gaussian-smoothed Dirichlet series sum chi(n) n^{-s} e^{-(n/X)^2}; the
  // independent second route. The neglected Mellin correction is
  // O(|L(s-2,chi)| / X^2).
  cplx value_smoothed(cplx s, double X = 3e5) const;
};

struct MomentTriple {
  double I2 = 0.0;
  double I3 = 0.0;
  double I4 = 0.0;
  double err = 0.0;  // worst relative refinement disagreement
  bool converged = true;
};

// Symmetrized critical-line integrand: both signs of t enter the contour
// split sum_{t>0} + sum_{t<0}, and only the symmetrized integral pairs
// exactly under chi <-> conj chi (the one-sided integrals differ for
// complex characters).
double critical_modulus_sym(const LEvaluator& ev, int k, double t);

// int_y^T (|L(1/2+it)|^k + |L(1/2-it)|^k) / (2t) dt for k = 2,3,4 in one
// pass; panel widths from the slow oscillation scale 2 pi / log(qT/2pi),
// refined until stable.
MomentTriple moment_integrals(const LEvaluator& ev, double y, double T, double rel_tol = 1e-5);

struct MomentResult {
  double value = 0.0;
  double err = 0.0;
  bool converged = true;
};

MomentResult moment_integral(const LEvaluator& ev, int k, double y, double T,
                             double rel_tol = 1e-5);

// Per-character moment integrals and their aggregates for one modulus;
// conjugate characters share one computation.
struct MomentReport {
  std::uint64_t q = 0;
  double T = 0.0;
  double y = 0.0;
  struct PerChar {
    std::uint32_t j = 0;
    double I2 = 0.0, I3 = 0.0, I4 = 0.0;
    double err = 0.0;
  };
  std::vector<PerChar> per_char;  // nonprincipal characters, ascending j
  double sum_I4 = 0.0;            // sum_{chi != chi0} I4
  double sum_I3_sq = 0.0;         // sum_{chi != chi0} I3^2
};

MomentReport compute_moment_report(const CharacterTable& table, double y, double T);

// sum_{chi != chi0} (int_1^T |L|^3 / t dt)^2
double lemma7_lhs(const CharacterTable& table, double T);

// sum_{chi != chi0} int_1^T |L|^4 / t dt
double fourth_moment_sum(const CharacterTable& table, double T);

struct SubconvexityScan {
  double max_ratio = 0.0;  // max over +-t of |L(1/2+it,chi)| / (q|t|)^{1/6}
  std::uint32_t argmax_j = 0;
  double argmax_t = 0.0;
};

SubconvexityScan subconvexity_ratio_scan(const CharacterTable& table,
                                         const std::vector<double>& t_grid);

std::string moment_report_to_json(const MomentReport& report);

}  // namespace d3ap
