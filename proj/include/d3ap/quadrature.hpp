#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace d3ap {

using cplx = std::complex<double>;

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n; cached per n.
const GaussRule& gauss_legendre(int n);

cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int n);

struct QuadResult {
  cplx value{0.0, 0.0};
  double err = 0.0;
  bool converged = true;
  long evals = 0;
};

// Adaptive bisection with embedded GL16 whole-vs-halves error estimate.
// width_hint(t), when given, caps the initial panel width near t so
// oscillatory integrands start resolved instead of aliased.
QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double abs_tol, long max_evals,
                              const std::function<double(double)>& width_hint = {});

QuadResult integrate_adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                                      double abs_tol, int max_depth = 40);

}  // namespace d3ap
