#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "d3ap/arith.hpp"

namespace d3ap {

// C-infinity window: 0 outside [x-Y, 2x+Y], 1 on [x, 2x], exp(-1/t)
// smoothstep on the two rolloffs, so w^(j) scales like 1/Y^j.
struct SmoothWindow {
  double x = 0.0;
  double Y = 0.0;

  SmoothWindow(double x_, double Y_);

  double lo() const { return x - Y; }
  double hi() const { return 2.0 * x + Y; }
  double value(double t) const;
  // j-th derivative, j <= 4 (higher orders rejected)
  double derivative(double t, int j) const;
};

double w_eval(const SmoothWindow& w, double t, int j);

struct USettings {
  double c = 0.1;            // abscissa, 0 < c < 1/6
  double abs_tol = 1e-9;     // absolute quadrature target per evaluation
  double rel_cut = 1e-12;    // ray blocks below this fraction of the total stop the walk
  long max_evals = 400000;   // integrand-evaluation budget per U call
  long what_budget = 60000;  // window-node budget per transform
  double ray_angle = 2.356194490192345;  // 3 pi / 4
};

// U(x) = (1/2 pi i) int_(c) (Gamma(s/2)/Gamma((1-s)/2))^3 x^{-s} ds.
// Vertical segment to past the stationary point t* = 2 x^{1/3}, then a ray
// into the upper-left where the integrand decays superexponentially; the
// lower half-plane is the mirror image. Throws on budget exhaustion.
double U_eval(double x, const USettings& settings = {});

// Diagnostic evaluation integrating both half-planes with deliberately
// asymmetric panelization; Im of the result measures quadrature quality
// rather than cancelling by construction.
cplx U_eval_diagnostic(double x, const USettings& settings = {});

struct WhatResult {
  double value = 0.0;
  double err = 0.0;
  bool converged = true;
  long u_evals = 0;
};

// Shared quadrature settings plus a U-value cache keyed by argument.
class KernelEval {
 public:
  explicit KernelEval(USettings settings = {});

  const USettings& settings() const { return settings_; }
  double U(double x) const;  // cached

  // w_hat_q(n) = int w(t) U(Nt) dt with N = pi^3 n / q; panels track the
  // oscillation 6 (N t)^{1/3}. Budget exhaustion is reported in the result,
  // never thrown.
  WhatResult w_hat(const SmoothWindow& w, std::uint64_t n, std::uint64_t q) const;

  std::size_t cache_size() const;

 private:
  USettings settings_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<double, double> cache_;
};

struct DecayRow {
  std::uint64_t n = 0;
  double N = 0.0;
  double what = 0.0;      // Re w_hat (the transform is real)
  double envelope = 0.0;  // max |w_hat| over a small n-neighborhood
  double err = 0.0;
  double exponent = 0.0;  // d log(envelope) / d log n against previous row
  bool ok = true;
};

struct DecayReport {
  std::vector<DecayRow> rows;
};

struct DecaySettings {
  double neighborhood = 0.0;  // fractional n-offsets for the envelope, e.g. 0.03; 0 = pointwise
};

DecayReport decay_scan(const KernelEval& kernel, const SmoothWindow& w, std::uint64_t q,
                       const std::vector<std::uint64_t>& n_grid, const DecaySettings& ds = {});

// Kernel scan CSV: n, N, Re w_hat, error estimate, local decay exponent.
std::filesystem::path write_kernel_csv(const DecayReport& report, double x, std::uint64_t q,
                                       const std::filesystem::path& dir);

}  // namespace d3ap
