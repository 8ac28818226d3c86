#include "d3ap/mainterm.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "d3ap/format.hpp"
#include "d3ap/kahan.hpp"
#include "d3ap/taylor.hpp"

namespace d3ap {

Rational theta(std::uint64_t n, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("theta: q must be positive");
  if (n == 0) throw std::invalid_argument("theta: n must be positive");
  std::uint64_t k = q / std::gcd(q, n);
  int mu_k = mobius_u64(k);
  if (mu_k == 0) return {0, 1};
  return {mu_k, static_cast<std::int64_t>(euler_phi_u64(k))};
}

cplx dirichlet_series_factor(std::uint64_t d, cplx s) {
  if (d == 1) return {1.0, 0.0};
  if (!is_prime(d))
    throw std::invalid_argument("dirichlet_series_factor: d must be 1 or prime");
  cplx w = std::exp(-s * std::log(static_cast<double>(d)));
  cplx om = 1.0 - w;
  return (static_cast<double>(d) * (1.0 - om * om * om) - 1.0) / static_cast<double>(d - 1);
}

namespace {

using Jet2 = TaylorJet<2>;

Jet2 G_jet(std::uint64_t d) {
  if (d == 1) return Jet2::constant(1.0);
  double ld = std::log(static_cast<double>(d));
  // d^{-s} at s = 1 + u
  Jet2 a;
  a.c[0] = -ld;
  a.c[1] = -ld;
  Jet2 w = a.exp();
  Jet2 om = 1.0 - w;
  return (static_cast<double>(d) * (1.0 - om * om * om) - 1.0) / static_cast<double>(d - 1);
}

Jet2 window_jet(double x1, double x2) {
  // ((x2)^s - (x1)^s)/s at s = 1 + u; x^(1+u) = x exp(u log x)
  Jet2 e2;
  e2.c[1] = std::log(x2);
  Jet2 e1;
  e1.c[1] = std::log(x1);
  Jet2 num = x2 * e2.exp() - x1 * e1.exp();
  Jet2 s;
  s.c[0] = 1.0;
  s.c[1] = 1.0;
  return num * s.reciprocal();
}

std::array<double, 3> residue_jet(std::uint64_t d, double x1, double x2) {
  // [(s-1) zeta(s)]^3 = (1 + gamma0 u - gamma1 u^2)^3 to order 2
  Jet2 z1;
  z1.c[0] = 1.0;
  z1.c[1] = kEulerGamma;
  z1.c[2] = -kStieltjesGamma1;
  Jet2 H = z1 * z1 * z1 * G_jet(d) * window_jet(x1, x2);
  return {H.c[0], H.c[1], H.c[2]};
}

}  // namespace

double residue_window_main(std::uint64_t d, double x1, double x2) {
  if (!(x2 > x1) || !(x1 > 0.0))
    throw std::invalid_argument("residue_window_main: need 0 < x1 < x2");
  if (d != 1 && !is_prime(d))
    throw std::invalid_argument("residue_window_main: d must be 1 or prime");
  return residue_jet(d, x1, x2)[2];  // coefficient of u^2 against the u^{-3} pole
}

double F_x(std::uint64_t d, double x) {
  if (!(x >= 2.0)) throw std::invalid_argument("F_x: x must be >= 2");
  return residue_window_main(d, x, 2.0 * x);
}

double F_x_contour(std::uint64_t d, double x, int nodes, double radius) {
  if (!(x >= 2.0)) throw std::invalid_argument("F_x_contour: x must be >= 2");
  if (!(radius > 0.0 && radius < 0.9))
    throw std::invalid_argument("F_x_contour: radius must stay inside (0, 0.9)");
  HurwitzSettings hs;
  hs.tol = 1e-13;
  KahanCSum acc;
  for (int k = 0; k < nodes; ++k) {
    double th = 2.0 * std::numbers::pi * k / nodes;
    cplx e(std::cos(th), std::sin(th));
    cplx s = 1.0 + radius * e;
    cplx z = riemann_zeta(s, hs);
    cplx f = z * z * z * dirichlet_series_factor(d, s) *
             (std::exp(s * std::log(2.0 * x)) - std::exp(s * std::log(x))) / s;
    acc.add(f * e);
  }
  // (1/2 pi i) integral = (radius / nodes) sum f e^{i theta}
  return (radius / nodes) * acc.value().real();
}

MainTermModel MainTermModel::build(double x, std::uint64_t q) {
  if (!(x >= 2.0)) throw std::invalid_argument("MainTermModel: x must be >= 2");
  if (!is_prime(q)) throw std::invalid_argument("MainTermModel: q must be prime");
  MainTermModel m;
  m.x = x;
  m.q = q;
  m.jet1 = residue_jet(1, x, 2.0 * x);
  m.jetq = residue_jet(q, x, 2.0 * x);
  m.F1 = m.jet1[2];
  m.Fq = m.jetq[2];
  return m;
}

double ClassDecomp::sum_E_sq() const {
  KahanSum s;
  for (std::uint64_t a = 1; a <= q; ++a) s.add(E[a] * E[a]);
  return s.value();
}

double ClassDecomp::sum_abs_E() const {
  KahanSum s;
  for (std::uint64_t a = 1; a <= q; ++a) s.add(std::abs(E[a]));
  return s.value();
}

ClassDecomp main_and_error(const APCounts& counts, const MainTermModel& model) {
  if (model.q != counts.q || model.x != counts.x)
    throw std::invalid_argument("main_and_error: counts and model disagree on (x, q)");
  const std::uint64_t q = counts.q;
  ClassDecomp d;
  d.q = q;
  d.x = counts.x;
  d.M.assign(q + 1, 0.0);
  d.E.assign(q + 1, 0.0);
  for (std::uint64_t a = 1; a <= q; ++a) {
    double cqa = (a == q) ? static_cast<double>(q - 1) : -1.0;  // c_q(a), prime q
    d.M[a] = (model.F1 + cqa * model.Fq) / static_cast<double>(q);
    d.E[a] = static_cast<double>(counts.counts[a]) - d.M[a];
  }
  return d;
}

Theorem2Report theorem2_check(const ResidueSpectrum& spectrum, const ClassDecomp& decomp) {
  if (spectrum.q != decomp.q || spectrum.x != decomp.x)
    throw std::invalid_argument("theorem2_check: spectrum and decomposition disagree on (x, q)");
  Theorem2Report r;
  r.sum_abs_E = decomp.sum_abs_E();
  double energy = static_cast<double>(decomp.q) * decomp.sum_E_sq();
  double delta_sq = spectrum.sum_delta_sq();
  r.sqrt_energy = std::sqrt(energy);
  r.sqrt_sum_delta_sq = std::sqrt(delta_sq);
  r.cauchy_schwarz_ok = r.sum_abs_E <= r.sqrt_energy * (1.0 + 1e-12) + 1e-12;
  r.parseval_rel_err = std::abs(energy - delta_sq) / std::max(delta_sq, 1e-300);
  return r;
}

std::filesystem::path write_errors_csv(const APCounts& counts, const ClassDecomp& decomp,
                                       const std::filesystem::path& dir) {
  auto path = dir / ("errors_x" + fmt_xq(decomp.x) + "_q" + std::to_string(decomp.q) + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_errors_csv: cannot open " + path.string());
  out << "a,count,M,E\n";
  for (std::uint64_t a = 1; a <= decomp.q; ++a) {
    out << a << ',' << counts.counts[a] << ',' << fmt_g(decomp.M[a]) << ',' << fmt_g(decomp.E[a])
        << '\n';
  }
  return path;
}

}  // namespace d3ap
