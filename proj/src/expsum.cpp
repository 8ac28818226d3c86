#include "d3ap/expsum.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "d3ap/fft.hpp"
#include "d3ap/format.hpp"
#include "d3ap/kahan.hpp"
#include "d3ap/mainterm.hpp"

namespace d3ap {

namespace {

std::uint64_t mod_reduce(std::int64_t v, std::uint64_t q) {
  std::int64_t qi = static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(((v % qi) + qi) % qi);
}

std::vector<cplx> unit_roots(std::uint64_t q) {
  std::vector<cplx> root(q);
  for (std::uint64_t k = 0; k < q; ++k) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
    root[k] = {std::cos(ang), std::sin(ang)};
  }
  return root;
}

}  // namespace

std::int64_t APCounts::total() const {
  std::int64_t t = 0;
  for (std::uint64_t a = 1; a <= q; ++a) t += counts[a];
  return t;
}

APCounts ap_counts(const SieveTable& sieve, double x, std::uint64_t q) {
  if (q < 2) throw std::invalid_argument("ap_counts: q must be >= 2");
  if (!(x > 0.0)) throw std::invalid_argument("ap_counts: x must be positive");
  if (2.0 * x > static_cast<double>(sieve.limit))
    throw std::out_of_range("ap_counts: 2x exceeds the sieve limit");

  APCounts c;
  c.q = q;
  c.x = x;
  c.counts.assign(q + 1, 0);
  std::uint64_t lo = static_cast<std::uint64_t>(std::floor(x)) + 1;
  std::uint64_t hi = static_cast<std::uint64_t>(std::floor(2.0 * x));
  for (std::uint64_t n = lo; n <= hi; ++n) {
    std::uint64_t a = n % q;
    c.counts[a == 0 ? q : a] += sieve.d3[n];
  }
  return c;
}

double ResidueSpectrum::sum_raw_sq() const {
  KahanSum s;
  for (std::uint64_t r = 1; r <= q; ++r) s.add(std::norm(raw[r]));
  return s.value();
}

double ResidueSpectrum::sum_delta_sq() const {
  KahanSum s;
  for (std::uint64_t r = 1; r <= q; ++r) s.add(std::norm(delta[r]));
  return s.value();
}

ResidueSpectrum delta_spectrum(const APCounts& counts, const MainTermModel& model) {
  if (model.q != counts.q || model.x != counts.x)
    throw std::invalid_argument("delta_spectrum: counts and model disagree on (x, q)");
  const std::uint64_t q = counts.q;

  std::vector<cplx> z(q);
  for (std::uint64_t j = 0; j < q; ++j)
    z[j] = static_cast<double>(counts.counts[j == 0 ? q : j]);
  auto X = dft(z, +1);  // X[r] = sum_j z[j] e(jr/q)

  ResidueSpectrum s;
  s.q = q;
  s.x = counts.x;
  s.raw.assign(q + 1, cplx(0.0));
  s.delta.assign(q + 1, cplx(0.0));
  for (std::uint64_t r = 1; r <= q; ++r) {
    s.raw[r] = X[r % q];
    s.delta[r] = s.raw[r] - (r == q ? model.F1 : model.Fq);
  }
  return s;
}

cplx R_abc(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t h, std::uint64_t q) {
  if (!is_prime(q)) throw std::invalid_argument("R_abc: q must be prime");
  std::uint64_t hm = mod_reduce(h, q);
  if (hm == 0) throw std::invalid_argument("R_abc: (h, q) must be 1");
  std::uint64_t am = mod_reduce(a, q), bm = mod_reduce(b, q), cm = mod_reduce(c, q);

  if (am == 0 || bm == 0 || cm == 0) {
    auto cq = [&](std::uint64_t v) {
      return v == 0 ? static_cast<std::int64_t>(q) - 1 : std::int64_t(-1);
    };
    std::int64_t qi = static_cast<std::int64_t>(q);
    return cplx(static_cast<double>(qi * (2 + cq(am) + cq(bm) + cq(cm) - qi)), 0.0);
  }
  std::uint64_t hinv = inv_mod_prime(hm, q);
  std::uint64_t w = bm * cm % q * hinv % q;
  return cplx(static_cast<double>(q) * kloosterman(static_cast<std::int64_t>(am),
                                                   static_cast<std::int64_t>(w), q),
              0.0);
}

cplx R_abc_brute(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t h, std::uint64_t q) {
  if (!is_prime(q)) throw std::invalid_argument("R_abc_brute: q must be prime");
  std::uint64_t hm = mod_reduce(h, q);
  if (hm == 0) throw std::invalid_argument("R_abc_brute: (h, q) must be 1");
  std::uint64_t am = mod_reduce(a, q), bm = mod_reduce(b, q), cm = mod_reduce(c, q);
  auto root = unit_roots(q);
  KahanCSum acc;
  for (std::uint64_t x = 1; x <= q; ++x) {
    for (std::uint64_t y = 1; y <= q; ++y) {
      std::uint64_t xy = x * y % q;
      std::uint64_t base = (am * x + bm * y) % q;
      for (std::uint64_t z = 1; z <= q; ++z) {
        std::uint64_t e = (base + cm * z % q + (q - hm * (xy * z % q) % q)) % q;
        acc.add(root[e]);
      }
    }
  }
  return acc.value();
}

cplx A_hq(std::uint64_t n, std::int64_t h, std::uint64_t q, const SieveTable& sieve) {
  if (!is_prime(q)) throw std::invalid_argument("A_hq: q must be prime");
  if (n == 0 || n > sieve.limit) throw std::out_of_range("A_hq: n outside the sieve");
  std::uint64_t hm = mod_reduce(h, q);
  if (hm == 0) throw std::invalid_argument("A_hq: (h, q) must be 1");

  std::uint64_t nm = n % q;
  double dq = static_cast<double>(q);
  if (nm != 0) {
    std::uint64_t hinv = inv_mod_prime(hm, q);
    double K = kloosterman(1, static_cast<std::int64_t>(nm * hinv % q), q);
    return cplx(0.5 * dq * sieve.d3[n] * K, 0.0);
  }
  std::uint32_t alpha = 0;
  std::uint64_t m = n;
  while (m % q == 0) {
    m /= q;
    ++alpha;
  }
  double Ca = 1.0 - 3.0 / (alpha + 2.0);
  return cplx(sieve.d3[n] * (Ca * dq * dq - 0.5 * dq), 0.0);
}

cplx A_hq_triple_sum(std::uint64_t n, std::int64_t h, std::uint64_t q, const SieveTable& sieve,
                     bool brute_R) {
  if (!is_prime(q)) throw std::invalid_argument("A_hq_triple_sum: q must be prime");
  if (n == 0 || n > sieve.limit) throw std::out_of_range("A_hq_triple_sum: n outside the sieve");
  KahanCSum acc;
  for (std::uint64_t a : sieve.divisors(n)) {
    for (std::uint64_t b : sieve.divisors(n / a)) {
      std::uint64_t c = n / a / b;
      cplx r = brute_R
                   ? R_abc_brute(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b),
                                 static_cast<std::int64_t>(c), h, q)
                   : R_abc(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b),
                           static_cast<std::int64_t>(c), h, q);
      acc.add(r);
    }
  }
  return 0.5 * acc.value();
}

cplx h_correlation(std::uint64_t n, std::uint64_t m, std::uint64_t q, const SieveTable& sieve) {
  KahanCSum acc;
  for (std::uint64_t h = 1; h < q; ++h) {
    acc.add(A_hq(n, static_cast<std::int64_t>(h), q, sieve) *
            std::conj(A_hq(m, static_cast<std::int64_t>(h), q, sieve)));
  }
  return acc.value();
}

double lemma3_rhs(std::uint64_t n, std::uint64_t m, std::uint64_t q, const SieveTable& sieve) {
  double dq = static_cast<double>(q);
  double dd = static_cast<double>(sieve.d3[n]) * static_cast<double>(sieve.d3[m]);
  double cq = static_cast<double>(
      ramanujan_sum(q, static_cast<std::int64_t>(m) - static_cast<std::int64_t>(n)));
  return dq * dq * dd * (dq * cq - 1.0) / 4.0;
}

double bilinear_cq_sum(std::uint64_t N, std::uint64_t M, std::uint64_t q,
                       const SieveTable& sieve) {
  if (!is_prime(q)) throw std::invalid_argument("bilinear_cq_sum: q must be prime");
  if (N > sieve.limit || M > sieve.limit)
    throw std::out_of_range("bilinear_cq_sum: limits exceed the sieve");

  // c_q(n-m) = q [n=m (q)] - 1 on classes coprime to q
  std::vector<std::int64_t> sn(q, 0), sm(q, 0);
  for (std::uint64_t n = 1; n <= N; ++n)
    if (n % q) sn[n % q] += sieve.d3[n];
  for (std::uint64_t m = 1; m <= M; ++m)
    if (m % q) sm[m % q] += sieve.d3[m];

  __int128 dot = 0, tn = 0, tm = 0;
  for (std::uint64_t r = 1; r < q; ++r) {
    dot += static_cast<__int128>(sn[r]) * sm[r];
    tn += sn[r];
    tm += sm[r];
  }
  __int128 result = static_cast<__int128>(q) * dot - tn * tm;
  return static_cast<double>(result);
}

cplx lemma9_lhs(int variant, double Q, double T, std::uint64_t q, std::span<const double> P,
                const SieveTable& sieve) {
  if (!is_prime(q)) throw std::invalid_argument("lemma9_lhs: q must be prime");
  if (variant < 1 || variant > 3) throw std::invalid_argument("lemma9_lhs: variant must be 1..3");
  double hi = (variant == 1) ? Q : T;
  if (hi > static_cast<double>(sieve.limit))
    throw std::out_of_range("lemma9_lhs: range exceeds the sieve");

  auto poly = [&](double z) {
    double v = 0.0;
    for (std::size_t i = P.size(); i-- > 0;) v = v * z + P[i];
    return v;
  };
  auto phase = [&](double v) {
    double ang = 2.0 * std::numbers::pi * std::cbrt(v / Q);
    return cplx(std::cos(ang), std::sin(ang));
  };

  // c_q expansion: LHS = q sum_r F(r) G(r) - (sum F)(sum G) over classes
  // coprime to q.
  std::vector<KahanCSum> F(q), G(q);
  auto accumulate = [&](std::vector<KahanCSum>& dst, double lo, double up, auto&& weight) {
    std::uint64_t from = static_cast<std::uint64_t>(std::floor(std::max(lo, static_cast<double>(q)))) + 1;
    std::uint64_t to = static_cast<std::uint64_t>(std::floor(up));
    for (std::uint64_t n = from; n <= to; ++n) {
      if (n % q == 0) continue;
      dst[n % q].add(static_cast<double>(sieve.d3[n]) * weight(static_cast<double>(n)));
    }
  };

  switch (variant) {
    case 1:
      accumulate(F, 0.0, Q, [&](double t) { return cplx(poly(std::log(t / Q)), 0.0); });
      accumulate(G, 0.0, Q, [&](double t) { return cplx(poly(std::log(t / Q)), 0.0); });
      break;
    case 2:
      accumulate(F, 0.0, Q, [&](double t) { return poly(std::log(t / Q)) * phase(t); });
      accumulate(G, Q, T, [&](double t) { return cplx(std::pow(t, -2.0 / 3.0), 0.0); });
      break;
    case 3:
      accumulate(F, Q, T, [&](double t) { return std::pow(t, -2.0 / 3.0) * phase(t); });
      accumulate(G, Q, T, [&](double t) { return std::pow(t, -2.0 / 3.0) * std::conj(phase(t)); });
      break;
  }

  KahanCSum dot, fs, gs;
  for (std::uint64_t r = 1; r < q; ++r) {
    dot.add(F[r].value() * G[r].value());
    fs.add(F[r].value());
    gs.add(G[r].value());
  }
  return static_cast<double>(q) * dot.value() - fs.value() * gs.value();
}

std::filesystem::path write_spectrum_csv(const ResidueSpectrum& s,
                                         const std::filesystem::path& dir) {
  auto path = dir / ("spectrum_x" + fmt_xq(s.x) + "_q" + std::to_string(s.q) + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_spectrum_csv: cannot open " + path.string());
  out << "r,re_S,im_S,re_delta,im_delta,delta_sq\n";
  for (std::uint64_t r = 1; r <= s.q; ++r) {
    out << r << ',' << fmt_g(s.raw[r].real()) << ',' << fmt_g(s.raw[r].imag()) << ','
        << fmt_g(s.delta[r].real()) << ',' << fmt_g(s.delta[r].imag()) << ','
        << fmt_g(std::norm(s.delta[r])) << '\n';
  }
  return path;
}

}  // namespace d3ap
