#include "d3ap/voronoi.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "d3ap/format.hpp"
#include "d3ap/gamma.hpp"
#include "d3ap/quadrature.hpp"
#include "d3ap/taylor.hpp"

namespace d3ap {

namespace {

constexpr double kPi = std::numbers::pi;

// exp(-1/u) smoothstep and its order-4 jet; u is affine in t, so
// w^(j)(t) = sigma^(j)(u) (du/dt)^j.
using Jet4 = TaylorJet<4>;

Jet4 sigma_jet(double u) {
  if (u <= 0.0) return Jet4::constant(0.0);
  if (u >= 1.0) return Jet4::constant(1.0);
  Jet4 uj = Jet4::variable(u);
  Jet4 f = (-(uj.reciprocal())).exp();
  Jet4 g = (-((1.0 - uj).reciprocal())).exp();
  return f / (f + g);
}

double sigma_value(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double f = std::exp(-1.0 / u);
  double g = std::exp(-1.0 / (1.0 - u));
  return f / (f + g);
}

// (Gamma(s/2)/Gamma((1-s)/2))^3 x^{-s} with the exponents fused; separate
// factors can pair underflow with overflow into NaN deep on the ray.
cplx u_integrand(cplx s, double lx) {
  return std::exp(3.0 * (log_gamma(0.5 * s) - log_gamma(0.5 * (1.0 - s))) - s * lx);
}

// One half-plane of the U contour: vertical [c, c+iT] then the ray
// s = c + iT + u e^{i theta}. direction up = +1 mirrors to the lower
// half-plane. panel_shift staggers initial panels (used by the
// diagnostic to avoid bitwise-mirrored quadrature).
QuadResult u_half_path(double x, const USettings& st, int up, double T, double panel_shift) {
  const double lx = std::log(x);
  const double c = st.c;
  const cplx i_unit(0.0, 1.0);

  auto vert = [&](double t) -> cplx {
    cplx s(c, up * t);
    return u_integrand(s, lx) * (static_cast<double>(up) * i_unit);
  };
  // oscillation scale: d/dt arg = 3 log(t/2) - log x; near t = 0 the
  // integrand varies on the scale of the distance to the pole at s = 0
  auto vert_width = [&](double t) {
    double osc = 2.0 * kPi / (std::abs(3.0 * std::log(std::max(t, 1e-3) / 2.0) - lx) + 1.0);
    double near0 = 0.5 * (t + c);
    return std::min({osc, near0 + 0.25 * T, T / 6.0}) * (1.0 + panel_shift);
  };
  QuadResult rv = integrate_adaptive(vert, 0.0, T, st.abs_tol * 0.25, st.max_evals, vert_width);

  const cplx dir = std::exp(cplx(0.0, up * st.ray_angle));
  const cplx s0(c, up * T);
  auto ray = [&](double u) -> cplx {
    cplx s = s0 + u * dir;
    return u_integrand(s, lx) * dir;
  };

  QuadResult total = rv;
  double lo = 0.0;
  double block = std::max(4.0, T / 4.0) * (1.0 + panel_shift);
  int quiet = 0;
  while (quiet < 2) {
    QuadResult rb = integrate_adaptive(ray, lo, lo + block, st.abs_tol * 0.25,
                                       st.max_evals - total.evals);
    total.value += rb.value;
    total.err += rb.err;
    total.evals += rb.evals;
    total.converged = total.converged && rb.converged;
    if (std::abs(rb.value) < st.rel_cut * (std::abs(total.value) + 1.0) + 0.01 * st.abs_tol)
      ++quiet;
    else
      quiet = 0;
    lo += block;
    block *= 2.0;
    if (total.evals > st.max_evals || lo > 1e7) {
      total.converged = false;
      break;
    }
  }
  return total;
}

double stationary_height(double x) { return 2.0 * std::cbrt(x); }

}  // namespace

double U_eval(double x, const USettings& st) {
  if (!(x > 0.0)) throw std::invalid_argument("U_eval: x must be positive");
  if (!(st.c > 0.0 && st.c < 1.0 / 6.0))
    throw std::invalid_argument("U_eval: abscissa must satisfy 0 < c < 1/6");
  double T = 2.0 * stationary_height(x) + 40.0;
  QuadResult up = u_half_path(x, st, +1, T, 0.0);
  if (!up.converged)
    throw std::runtime_error("U_eval: quadrature budget exhausted (best estimate " +
                             fmt_g(up.value.imag() / kPi) + ", error bound " + fmt_g(up.err) +
                             ")");
  // U = (1/2 pi i) [path + mirror] = Im(path integral) / pi
  return up.value.imag() / kPi;
}

cplx U_eval_diagnostic(double x, const USettings& st) {
  if (!(x > 0.0)) throw std::invalid_argument("U_eval_diagnostic: x must be positive");
  double T = 2.0 * stationary_height(x) + 40.0;
  QuadResult up = u_half_path(x, st, +1, T, 0.0);
  QuadResult down = u_half_path(x, st, -1, T * 1.17, 0.23);
  if (!up.converged || !down.converged)
    throw std::runtime_error("U_eval_diagnostic: quadrature budget exhausted");
  // down path traverses from the lower ray toward the real axis; flip sign
  cplx J = up.value - down.value;
  return J / (2.0 * kPi * cplx(0.0, 1.0));
}

SmoothWindow::SmoothWindow(double x_, double Y_) : x(x_), Y(Y_) {
  if (!(Y >= 1.0 && Y <= x)) throw std::invalid_argument("SmoothWindow: need 1 <= Y <= x");
}

double SmoothWindow::value(double t) const {
  if (t <= x - Y || t >= 2.0 * x + Y) return 0.0;
  if (t >= x && t <= 2.0 * x) return 1.0;
  if (t < x) return sigma_value((t - (x - Y)) / Y);
  return sigma_value((2.0 * x + Y - t) / Y);
}

double SmoothWindow::derivative(double t, int j) const {
  if (j < 0 || j > 4)
    throw std::invalid_argument("SmoothWindow::derivative: only orders 0..4 implemented");
  if (j == 0) return value(t);
  if (t <= x - Y || t >= 2.0 * x + Y || (t >= x && t <= 2.0 * x)) return 0.0;
  double scale = 1.0;
  Jet4 jet;
  if (t < x) {
    jet = sigma_jet((t - (x - Y)) / Y);
    scale = 1.0 / Y;
  } else {
    jet = sigma_jet((2.0 * x + Y - t) / Y);
    scale = -1.0 / Y;
  }
  return jet.deriv(j) * std::pow(scale, j);
}

double w_eval(const SmoothWindow& w, double t, int j) { return w.derivative(t, j); }

KernelEval::KernelEval(USettings settings) : settings_(settings) {}

double KernelEval::U(double x) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
  }
  double v = U_eval(x, settings_);
  std::lock_guard<std::mutex> lock(mutex_);
  if (cache_.size() > 2'000'000) cache_.clear();
  cache_.emplace(x, v);
  return v;
}

std::size_t KernelEval::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

WhatResult KernelEval::w_hat(const SmoothWindow& w, std::uint64_t n, std::uint64_t q) const {
  if (n == 0 || q == 0) throw std::invalid_argument("w_hat: n and q must be positive");
  const double N = kPi * kPi * kPi * static_cast<double>(n) / static_cast<double>(q);

  long evals = 0;
  auto f = [&](double t) -> cplx {
    ++evals;
    return cplx(w.value(t) * U(N * t), 0.0);
  };
  // phase 6 (N t)^{1/3}: one oscillation spans dt = pi t^{2/3} / N^{1/3}
  auto width = [&](double t) {
    double osc = kPi * std::pow(std::max(t, 1.0), 2.0 / 3.0) / std::cbrt(N);
    return std::min(osc, w.Y / 3.0);
  };

  WhatResult r;
  QuadResult qr =
      integrate_adaptive(f, w.lo(), w.hi(), 1e-10 * (1.0 + w.x), settings_.what_budget, width);
  r.value = qr.value.real();
  r.err = qr.err;
  r.converged = qr.converged;
  r.u_evals = evals;
  return r;
}

DecayReport decay_scan(const KernelEval& kernel, const SmoothWindow& w, std::uint64_t q,
                       const std::vector<std::uint64_t>& n_grid, const DecaySettings& ds) {
  DecayReport rep;
  rep.rows.reserve(n_grid.size());
  for (std::uint64_t n : n_grid) {
    DecayRow row;
    row.n = n;
    row.N = kPi * kPi * kPi * static_cast<double>(n) / static_cast<double>(q);
    double env = 0.0;
    double err = 0.0;
    bool ok = true;
    std::vector<std::uint64_t> probes{n};
    if (ds.neighborhood > 0.0) {
      auto lo = static_cast<std::uint64_t>(std::llround(n * (1.0 - ds.neighborhood)));
      auto hi = static_cast<std::uint64_t>(std::llround(n * (1.0 + ds.neighborhood)));
      if (lo >= 1 && lo != n) probes.push_back(lo);
      if (hi != n && hi != lo) probes.push_back(hi);
    }
    double center = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      WhatResult r = kernel.w_hat(w, probes[i], q);
      ok = ok && r.converged;
      env = std::max(env, std::abs(r.value));
      err = std::max(err, r.err);
      if (i == 0) center = r.value;
    }
    row.what = center;
    row.envelope = env;
    row.err = err;
    row.ok = ok;
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& prev = rep.rows[i - 1];
    auto& cur = rep.rows[i];
    double dlogn = std::log(static_cast<double>(cur.n)) - std::log(static_cast<double>(prev.n));
    if (prev.envelope > 0.0 && cur.envelope > 0.0 && dlogn > 0.0)
      cur.exponent = (std::log(cur.envelope) - std::log(prev.envelope)) / dlogn;
  }
  return rep;
}

std::filesystem::path write_kernel_csv(const DecayReport& report, double x, std::uint64_t q,
                                       const std::filesystem::path& dir) {
  auto path = dir / ("kernel_x" + fmt_xq(x) + "_q" + std::to_string(q) + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_kernel_csv: cannot open " + path.string());
  out << "n,N,re_what,err,exponent\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << fmt_g(r.N) << ',' << fmt_g(r.what) << ',' << fmt_g(r.err) << ','
        << fmt_g(r.exponent) << '\n';
  }
  return path;
}

}  // namespace d3ap
