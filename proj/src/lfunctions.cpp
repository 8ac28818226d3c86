#include "d3ap/lfunctions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d3ap/kahan.hpp"
#include "d3ap/quadrature.hpp"

#include "json.hpp"

namespace d3ap {

cplx LEvaluator::value(cplx s) const {
  if (table == nullptr) throw std::invalid_argument("LEvaluator: no character table");
  if (j == 0 && s.real() <= 1.0)
    throw std::invalid_argument("L_value: principal character handled only for Re(s) > 1");
  const std::uint32_t q = table->q;
  KahanCSum acc;
  for (std::uint32_t a = 1; a < q; ++a) {
    acc.add(table->chi(j, a) * hurwitz_zeta(s, static_cast<double>(a) / q, hurwitz));
  }
  return std::exp(-s * std::log(static_cast<double>(q))) * acc.value();
}

cplx LEvaluator::value_smoothed(cplx s, double X) const {
  if (table == nullptr) throw std::invalid_argument("LEvaluator: no character table");
  if (j == 0 && s.real() <= 1.0)
    throw std::invalid_argument("L_value: principal character handled only for Re(s) > 1");
  const std::uint32_t q = table->q;
  // e^{-(n/X)^2} < 1e-16 beyond n = X sqrt(16 ln 10)
  auto nmax = static_cast<std::uint64_t>(std::ceil(X * std::sqrt(16.0 * std::numbers::ln10)));
  KahanCSum acc;
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    if (n % q == 0) continue;
    double u = static_cast<double>(n) / X;
    acc.add(table->chi(j, static_cast<std::int64_t>(n)) *
            std::exp(-s * std::log(static_cast<double>(n))) * std::exp(-u * u));
  }
  return acc.value();
}

double critical_modulus_sym(const LEvaluator& ev, int k, double t) {
  double lp = std::abs(ev.value(cplx(0.5, t)));
  double lm = std::abs(ev.value(cplx(0.5, -t)));
  return 0.5 * (std::pow(lp, k) + std::pow(lm, k));
}

MomentTriple moment_integrals(const LEvaluator& ev, double y, double T, double rel_tol) {
  if (!(y >= 1.0)) throw std::invalid_argument("moment_integrals: y must be >= 1");
  if (T < y) throw std::invalid_argument("moment_integrals: T must be >= y");
  MomentTriple out;
  if (T == y) return out;

  const double q = static_cast<double>(ev.table->q);
  const double osc = 2.0 * std::numbers::pi / std::log(std::max(q * T / (2.0 * std::numbers::pi), 3.0));

  auto sample = [&](int panels) {
    const GaussRule& rule = gauss_legendre(8);
    MomentTriple m;
    double h = (T - y) / panels;
    KahanSum s2, s3, s4;
    for (int p = 0; p < panels; ++p) {
      double a = y + p * h;
      double mid = a + 0.5 * h;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        double t = mid + 0.5 * h * rule.x[i];
        double lp = std::abs(ev.value(cplx(0.5, t)));
        double lm = std::abs(ev.value(cplx(0.5, -t)));
        double wgt = rule.w[i] * 0.5 * h / t;
        s2.add(wgt * 0.5 * (lp * lp + lm * lm));
        s3.add(wgt * 0.5 * (lp * lp * lp + lm * lm * lm));
        s4.add(wgt * 0.5 * (lp * lp * lp * lp + lm * lm * lm * lm));
      }
    }
    m.I2 = s2.value();
    m.I3 = s3.value();
    m.I4 = s4.value();
    return m;
  };

  int panels = std::max(4, static_cast<int>(std::ceil((T - y) / osc)));
  MomentTriple prev = sample(panels);
  for (int round = 0; round < 6; ++round) {
    panels *= 2;
    MomentTriple cur = sample(panels);
    double rel = 0.0;
    rel = std::max(rel, std::abs(cur.I2 - prev.I2) / std::max(cur.I2, 1e-300));
    rel = std::max(rel, std::abs(cur.I3 - prev.I3) / std::max(cur.I3, 1e-300));
    rel = std::max(rel, std::abs(cur.I4 - prev.I4) / std::max(cur.I4, 1e-300));
    cur.err = rel;
    if (rel < rel_tol) return cur;
    prev = cur;
  }
  prev.converged = false;
  return prev;
}

MomentResult moment_integral(const LEvaluator& ev, int k, double y, double T, double rel_tol) {
  if (k < 2 || k > 4) throw std::invalid_argument("moment_integral: k must be 2, 3 or 4");
  MomentTriple t = moment_integrals(ev, y, T, rel_tol);
  MomentResult r;
  r.value = (k == 2) ? t.I2 : (k == 3) ? t.I3 : t.I4;
  r.err = t.err;
  r.converged = t.converged;
  return r;
}

MomentReport compute_moment_report(const CharacterTable& table, double y, double T) {
  MomentReport rep;
  rep.q = table.q;
  rep.T = T;
  rep.y = y;
  rep.per_char.assign(table.order - 1, {});
  std::vector<bool> done(table.order, false);
  for (std::uint32_t j = 1; j < table.order; ++j) {
    if (done[j]) continue;
    LEvaluator ev{&table, j};
    MomentTriple t = moment_integrals(ev, y, T);
    std::uint32_t jc = table.conj_index(j);
    // conjugating chi swaps t -> -t in the integrand, which the
    // symmetrized integral absorbs exactly
    for (std::uint32_t jj : {j, jc}) {
      auto& pc = rep.per_char[jj - 1];
      pc.j = jj;
      pc.I2 = t.I2;
      pc.I3 = t.I3;
      pc.I4 = t.I4;
      pc.err = t.err;
      done[jj] = true;
    }
  }
  KahanSum s4, s3sq;
  for (const auto& pc : rep.per_char) {
    s4.add(pc.I4);
    s3sq.add(pc.I3 * pc.I3);
  }
  rep.sum_I4 = s4.value();
  rep.sum_I3_sq = s3sq.value();
  return rep;
}

double lemma7_lhs(const CharacterTable& table, double T) {
  return compute_moment_report(table, 1.0, T).sum_I3_sq;
}

double fourth_moment_sum(const CharacterTable& table, double T) {
  return compute_moment_report(table, 1.0, T).sum_I4;
}

SubconvexityScan subconvexity_ratio_scan(const CharacterTable& table,
                                         const std::vector<double>& t_grid) {
  SubconvexityScan scan;
  for (std::uint32_t j = 1; j < table.order; ++j) {
    LEvaluator ev{&table, j};
    for (double t : t_grid) {
      if (!(t >= 1.0)) throw std::invalid_argument("subconvexity_ratio_scan: t must be >= 1");
      double mod = std::max(std::abs(ev.value(cplx(0.5, t))), std::abs(ev.value(cplx(0.5, -t))));
      double ratio = mod / std::pow(static_cast<double>(table.q) * t, 1.0 / 6.0);
      if (ratio > scan.max_ratio) {
        scan.max_ratio = ratio;
        scan.argmax_j = j;
        scan.argmax_t = t;
      }
    }
  }
  return scan;
}

std::string moment_report_to_json(const MomentReport& r) {
  nlohmann::json j;
  j["q"] = r.q;
  j["T"] = r.T;
  j["y"] = r.y;
  j["per_char"] = nlohmann::json::array();
  for (const auto& pc : r.per_char) {
    j["per_char"].push_back(
        {{"j", pc.j}, {"I2", pc.I2}, {"I3", pc.I3}, {"I4", pc.I4}, {"err", pc.err}});
  }
  j["sums"] = {{"I4_sum", r.sum_I4}, {"I3_sq_sum", r.sum_I3_sq}};
  return j.dump(2);
}

}  // namespace d3ap
