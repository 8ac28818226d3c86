#include "d3ap/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "d3ap/expsum.hpp"
#include "d3ap/format.hpp"
#include "d3ap/kahan.hpp"
#include "d3ap/mainterm.hpp"

#include "json.hpp"

namespace d3ap {

using nlohmann::json;

// ------------------------------------------------------------------- config

std::vector<std::uint64_t> ExperimentConfig::resolve_q(double x) const {
  std::vector<std::uint64_t> out;
  switch (q_rule.kind) {
    case QRule::Kind::list:
      out = q_rule.list;
      break;
    case QRule::Kind::range_primes:
      out = primes_in_range(q_rule.q_min, q_rule.q_max);
      break;
    case QRule::Kind::near_theta:
      for (double th : q_rule.theta_list) {
        double target = std::pow(x, th);
        auto t = static_cast<std::uint64_t>(std::llround(target));
        std::uint64_t best = 0;
        for (std::uint64_t d = 0; d <= t + 3; ++d) {
          if (t >= d && is_prime(t - d)) {
            best = t - d;
            break;
          }
          if (is_prime(t + d)) {
            best = t + d;
            break;
          }
        }
        if (best >= 2) out.push_back(best);
      }
      break;
  }
  // drop duplicates, keep first occurrence
  std::vector<std::uint64_t> dedup;
  for (std::uint64_t q : out) {
    if (std::find(dedup.begin(), dedup.end(), q) == dedup.end()) dedup.push_back(q);
  }
  return dedup;
}

void ExperimentConfig::validate() const {
  if (schema_version != 1)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(schema_version));
  if (x_list.empty()) throw ConfigError("x_list", "must not be empty");
  for (double x : x_list) {
    if (!(x >= 2.0)) throw ConfigError("x_list", "entries must be >= 2, got " + fmt_g(x));
  }
  if (q_rule.kind == QRule::Kind::list) {
    for (std::uint64_t q : q_rule.list) {
      if (!is_prime(q))
        throw ConfigError("q_rule.q_list", std::to_string(q) + " is not prime");
    }
  }
  if (q_rule.kind == QRule::Kind::range_primes && q_rule.q_min > q_rule.q_max)
    throw ConfigError("q_rule.q_min", "q_min exceeds q_max");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon", "must be >= 0");
  if (!y_optimal && !(y_fixed >= 1.0)) throw ConfigError("y_rule.Y", "fixed Y must be >= 1");
  if (!(tolerance_scale > 0.0)) throw ConfigError("tolerance_scale", "must be positive");
  if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
  if (verify.inject_fault != "none" && verify.inject_fault != "kloosterman_sign")
    throw ConfigError("verify.inject_fault", "unknown fault '" + verify.inject_fault + "'");
  for (std::uint64_t q : moments.q_list) {
    if (q == 2 || !is_prime(q))
      throw ConfigError("moments.q_list", std::to_string(q) + " is not an odd prime");
  }
  if (!(moments.y >= 1.0)) throw ConfigError("moments.y", "must be >= 1");
  if (!(moments.T >= moments.y)) throw ConfigError("moments.T", "must be >= y");
  if (!is_prime(kernel.q)) throw ConfigError("kernel.q", "must be prime");
  if (!(kernel.Y >= 1.0 && kernel.Y <= kernel.x))
    throw ConfigError("kernel.Y", "must satisfy 1 <= Y <= x");
  if (!(kernel.n_ratio > 1.0)) throw ConfigError("kernel.n_ratio", "must exceed 1");
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "has the wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.schema_version = get_or(j, "schema_version", 1);
  cfg.x_list = get_or(j, "x_list", cfg.x_list);
  if (j.contains("q_rule")) {
    const json& qr = j.at("q_rule");
    std::string kind = get_or<std::string>(qr, "kind", "list");
    if (kind == "list") {
      cfg.q_rule.kind = QRule::Kind::list;
      cfg.q_rule.list = get_or(qr, "q_list", cfg.q_rule.list);
    } else if (kind == "range_primes") {
      cfg.q_rule.kind = QRule::Kind::range_primes;
      cfg.q_rule.q_min = get_or<std::uint64_t>(qr, "q_min", 3);
      cfg.q_rule.q_max = get_or<std::uint64_t>(qr, "q_max", 31);
    } else if (kind == "near_theta") {
      cfg.q_rule.kind = QRule::Kind::near_theta;
      cfg.q_rule.theta_list = get_or(qr, "theta_list", std::vector<double>{0.5});
    } else {
      throw ConfigError("q_rule.kind", "unknown kind '" + kind + "'");
    }
  }
  cfg.epsilon = get_or(j, "epsilon", cfg.epsilon);
  if (j.contains("y_rule")) {
    const json& yr = j.at("y_rule");
    std::string kind = get_or<std::string>(yr, "kind", "optimal");
    if (kind == "optimal") {
      cfg.y_optimal = true;
    } else if (kind == "fixed") {
      cfg.y_optimal = false;
      cfg.y_fixed = get_or(yr, "Y", 0.0);
    } else {
      throw ConfigError("y_rule.kind", "unknown kind '" + kind + "'");
    }
  }
  cfg.sieve_cache_dir = get_or<std::string>(j, "sieve_cache_dir", cfg.sieve_cache_dir);
  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir);
  cfg.tolerance_scale = get_or(j, "tolerance_scale", cfg.tolerance_scale);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.jobs = get_or(j, "jobs", cfg.jobs);
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    cfg.verify.suites = get_or(v, "suites", cfg.verify.suites);
    cfg.verify.inject_fault = get_or<std::string>(v, "inject_fault", cfg.verify.inject_fault);
  }
  if (j.contains("moments")) {
    const json& m = j.at("moments");
    cfg.moments.q_list = get_or(m, "q_list", cfg.moments.q_list);
    cfg.moments.T = get_or(m, "T", cfg.moments.T);
    cfg.moments.y = get_or(m, "y", cfg.moments.y);
  }
  if (j.contains("kernel")) {
    const json& k = j.at("kernel");
    cfg.kernel.x = get_or(k, "x", cfg.kernel.x);
    cfg.kernel.Y = get_or(k, "Y", cfg.kernel.Y);
    cfg.kernel.q = get_or(k, "q", cfg.kernel.q);
    cfg.kernel.epsilon = get_or(k, "epsilon", cfg.kernel.epsilon);
    cfg.kernel.n_from = get_or(k, "n_from", cfg.kernel.n_from);
    cfg.kernel.n_to = get_or(k, "n_to", cfg.kernel.n_to);
    cfg.kernel.n_ratio = get_or(k, "n_ratio", cfg.kernel.n_ratio);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

Params choose_parameters(double x, std::uint64_t q, double epsilon) {
  if (!(x > 0.0) || q == 0) throw std::invalid_argument("choose_parameters: x, q must be positive");
  if (static_cast<double>(q) > x)
    throw std::invalid_argument("choose_parameters: requires q <= x");
  Params p;
  double y = std::pow(x, 0.75) * std::pow(static_cast<double>(q), 11.0 / 32.0);
  p.Y = std::clamp(y, static_cast<double>(q), x);
  p.T = std::pow(x * static_cast<double>(q) / p.Y, 3.0) * std::pow(x, epsilon - 1.0);
  return p;
}

// ------------------------------------------------------------------- verify

std::uint64_t verify_sieve_limit() {
  return 45000;  // covers n = 13^3 * 20 in the Lemma 2 suite and 2x for x up to 1e4
}

namespace {

struct SuiteBuilder {
  SuiteResult result;
  double tol_scale = 1.0;

  void check(const std::string& lemma, const std::string& params, double got, double want,
             double tol) {
    ++result.cases;
    double t = tol * tol_scale;
    if (!(std::abs(got - want) <= t)) {
      result.failures.push_back({lemma, params, got, want, t});
    }
  }
  void check_rel(const std::string& lemma, const std::string& params, double got, double want,
                 double rel_tol) {
    check(lemma, params, got, want, rel_tol * std::max(1.0, std::abs(want)));
  }
  void require(const std::string& lemma, const std::string& params, bool ok) {
    ++result.cases;
    if (!ok) result.failures.push_back({lemma, params, 0.0, 1.0, 0.0});
  }
};

SuiteResult suite_ramanujan(double tol_scale) {
  SuiteBuilder b{{"ramanujan"}, tol_scale};
  for (std::uint64_t q = 1; q <= 200; ++q) {
    for (std::int64_t n = 0; n <= 200; ++n) {
      cplx direct = ramanujan_sum_direct(q, n);
      auto want = static_cast<double>(ramanujan_sum(q, n));
      b.check("ramanujan_formula", "q=" + std::to_string(q) + ",n=" + std::to_string(n),
              direct.real(), want, 1e-9);
      if (std::abs(direct.imag()) > 1e-9 * tol_scale)
        b.require("ramanujan_formula", "imag q=" + std::to_string(q), false);
    }
  }
  for (std::uint64_t q : primes_in_range(2, 60)) {
    for (std::int64_t n = 1; n <= 40; ++n) {
      std::int64_t want = (n % static_cast<std::int64_t>(q) == 0)
                              ? static_cast<std::int64_t>(q) - 1
                              : -1;
      b.require("ramanujan_prime_form", "q=" + std::to_string(q) + ",n=" + std::to_string(n),
                ramanujan_sum(q, n) == want);
    }
  }
  return b.result;
}

SuiteResult suite_kloosterman(double tol_scale, std::uint64_t seed) {
  SuiteBuilder b{{"kloosterman"}, tol_scale};
  std::mt19937_64 rng(seed);
  for (std::uint64_t q : primes_in_range(2, 101)) {
    std::uniform_int_distribution<std::int64_t> pick(0, static_cast<std::int64_t>(q) - 1);
    long samples = q <= 13 ? static_cast<long>(q * q) : 40;
    for (long i = 0; i < samples; ++i) {
      std::int64_t n = q <= 13 ? i / static_cast<std::int64_t>(q) : pick(rng);
      std::int64_t m = q <= 13 ? i % static_cast<std::int64_t>(q) : pick(rng);
      double k1 = kloosterman(n, m, q);  // throws if |imag| >= 1e-9
      double k2 = kloosterman(m, n, q);
      b.check("kloosterman_symmetry",
              "q=" + std::to_string(q) + ",n=" + std::to_string(n) + ",m=" + std::to_string(m),
              k1, k2, 1e-9);
      if (n % static_cast<std::int64_t>(q) != 0 || m % static_cast<std::int64_t>(q) != 0) {
        b.require("kloosterman_weil", "q=" + std::to_string(q),
                  std::abs(k1) <= 2.0 * std::sqrt(static_cast<double>(q)) + 1e-9);
      }
    }
  }
  return b.result;
}

SuiteResult suite_lemma2(double tol_scale, const SieveTable& sieve) {
  SuiteBuilder b{{"lemma2"}, tol_scale};
  for (std::uint64_t q : {3, 5, 7, 11, 13}) {
    double dq = static_cast<double>(q);
    for (std::uint32_t alpha = 1; alpha <= 3; ++alpha) {
      std::uint64_t qa = 1;
      for (std::uint32_t i = 0; i < alpha; ++i) qa *= q;
      for (std::uint64_t ell = 1; ell <= 20; ++ell) {
        if (ell % q == 0) continue;
        std::uint64_t n = qa * ell;
        double Ca = 1.0 - 3.0 / (alpha + 2.0);
        double want = sieve.d3[n] * (Ca * dq * dq - 0.5 * dq);
        double first = 0.0;
        for (std::uint64_t h = 1; h < q; ++h) {
          cplx got = A_hq_triple_sum(n, static_cast<std::int64_t>(h), q, sieve, false);
          b.check_rel("lemma2_closed_form",
                      "q=" + std::to_string(q) + ",n=" + std::to_string(n) +
                          ",h=" + std::to_string(h),
                      got.real(), want, 1e-6);
          if (h == 1)
            first = got.real();
          else
            b.check_rel("lemma2_h_independence", "q=" + std::to_string(q) + ",n=" + std::to_string(n),
                        got.real(), first, 1e-9);
        }
      }
    }
    // h-sum identity for q | n, q not | m:
    // sum_h A(n) conj(A(m)) = q d3(m) A_{1/q}(n) / 2
    for (std::uint64_t n : {q, 2 * q, q * q}) {
      for (std::uint64_t m : {1ull, 2ull, 5ull}) {
        if (m % q == 0) continue;
        cplx corr = h_correlation(n, m, q, sieve);
        double want = dq * sieve.d3[m] * A_hq(n, 1, q, sieve).real() / 2.0;
        b.check_rel("lemma2_hsum",
                    "q=" + std::to_string(q) + ",n=" + std::to_string(n) + ",m=" + std::to_string(m),
                    corr.real(), want, 1e-6);
        b.check("lemma2_hsum_imag", "q=" + std::to_string(q) + ",n=" + std::to_string(n),
                corr.imag(), 0.0, 1e-6);
      }
    }
  }
  return b.result;
}

using KloostermanFn = std::function<double(std::int64_t, std::int64_t, std::uint64_t)>;

SuiteResult suite_lemma3(double tol_scale, const SieveTable& sieve, const KloostermanFn& kfn) {
  SuiteBuilder b{{"lemma3"}, tol_scale};
  for (std::uint64_t q : primes_in_range(2, 31)) {
    double dq = static_cast<double>(q);
    for (std::uint64_t n = 1; n <= 50; ++n) {
      if (n % q == 0) continue;
      for (std::uint64_t m = 1; m <= 50; ++m) {
        if (m % q == 0) continue;
        cplx corr = h_correlation(n, m, q, sieve);
        double want = lemma3_rhs(n, m, q, sieve);
        b.check_rel("lemma3",
                    "q=" + std::to_string(q) + ",n=" + std::to_string(n) + ",m=" + std::to_string(m),
                    corr.real(), want,
                    1e-6);
        b.check("lemma3_imag", "q=" + std::to_string(q) + ",n=" + std::to_string(n), corr.imag(),
                0.0, 1e-6 * std::max(1.0, std::abs(want)));
      }
    }
    // Kloosterman-route reconstruction (the injectable path): for (nm,q)=1
    // the correlation is q^2 d3(n) d3(m)/4 sum_h K(1,n hbar) K(1,m hbar).
    if (q >= 3) {
      for (std::uint64_t n : {1ull, 2ull}) {
        for (std::uint64_t m : {2ull, 3ull}) {
          if (n % q == 0 || m % q == 0) continue;
          KahanSum hsum;
          for (std::uint64_t h = 1; h < q; ++h) {
            std::uint64_t hinv = inv_mod_prime(h, q);
            hsum.add(kfn(1, static_cast<std::int64_t>(n * hinv % q), q) *
                     kfn(1, static_cast<std::int64_t>(m * hinv % q), q));
          }
          double got = dq * dq * sieve.d3[n] * sieve.d3[m] / 4.0 * hsum.value();
          double want = lemma3_rhs(n, m, q, sieve);
          b.check_rel("lemma3",
                      "kloosterman route q=" + std::to_string(q) + ",n=" + std::to_string(n) +
                          ",m=" + std::to_string(m),
                      got, want, 1e-6);
        }
      }
    }
  }
  // spot values
  {
    KahanSum inner;
    for (std::uint64_t h = 1; h < 5; ++h) {
      std::uint64_t hinv = inv_mod_prime(h, 5);
      inner.add(kloosterman(1, static_cast<std::int64_t>(2 * hinv % 5), 5) *
                kloosterman(1, static_cast<std::int64_t>(3 * hinv % 5), 5));
    }
    b.check("lemma3", "inner correlation q=5,n=2,m=3", inner.value(), -6.0, 1e-9);
    b.check("lemma3", "q=5,n=2,m=3", h_correlation(2, 3, 5, sieve).real(), -337.5, 1e-6);
  }
  return b.result;
}

SuiteResult suite_parseval(double tol_scale, const SieveTable& sieve) {
  SuiteBuilder b{{"parseval"}, tol_scale};
  for (double x : {30.0, 1000.0, 10000.0}) {
    for (std::uint64_t q : {3, 7, 31, 101}) {
      APCounts counts = ap_counts(sieve, x, q);
      MainTermModel model = MainTermModel::build(x, q);
      ResidueSpectrum spec = delta_spectrum(counts, model);
      ClassDecomp decomp = main_and_error(counts, model);
      double lhs = decomp.sum_E_sq();
      double rhs = spec.sum_delta_sq() / static_cast<double>(q);
      b.check_rel("eq1_parseval", "x=" + fmt_g(x) + ",q=" + std::to_string(q), lhs, rhs, 1e-9);
    }
  }
  return b.result;
}

}  // namespace

bool VerifyReport::all_passed() const {
  for (const auto& s : suites) {
    if (!s.passed()) return false;
  }
  return true;
}

std::string VerifyReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["suites"] = json::array();
  for (const auto& s : suites) {
    json js;
    js["name"] = s.name;
    js["cases"] = s.cases;
    js["passed"] = s.passed();
    js["failures"] = json::array();
    for (const auto& f : s.failures) {
      js["failures"].push_back({{"lemma", f.lemma},
                                {"params", f.params},
                                {"got", f.got},
                                {"want", f.want},
                                {"tolerance", f.tolerance}});
    }
    j["suites"].push_back(js);
  }
  j["all_passed"] = all_passed();
  return j.dump(2);
}

VerifyReport run_verify(const ExperimentConfig& cfg, const SieveTable& sieve) {
  if (sieve.limit < verify_sieve_limit())
    throw std::invalid_argument("run_verify: sieve limit below " +
                                std::to_string(verify_sieve_limit()));
  const double ts = cfg.tolerance_scale;

  KloostermanFn kfn = [](std::int64_t n, std::int64_t m, std::uint64_t q) {
    return kloosterman(n, m, q);
  };
  if (cfg.verify.inject_fault == "kloosterman_sign") {
    // test seam: flip the sign of exactly one evaluation
    auto fired = std::make_shared<bool>(false);
    kfn = [fired](std::int64_t n, std::int64_t m, std::uint64_t q) {
      double v = kloosterman(n, m, q);
      if (!*fired) {
        *fired = true;
        return -v;
      }
      return v;
    };
  }

  auto selected = [&](const std::string& name) {
    for (const auto& s : cfg.verify.suites) {
      if (s == "all" || s == name) return true;
    }
    return false;
  };

  VerifyReport rep;
  if (selected("ramanujan")) rep.suites.push_back(suite_ramanujan(ts));
  if (selected("kloosterman")) rep.suites.push_back(suite_kloosterman(ts, cfg.seed));
  if (selected("lemma2")) rep.suites.push_back(suite_lemma2(ts, sieve));
  if (selected("lemma3")) rep.suites.push_back(suite_lemma3(ts, sieve, kfn));
  if (selected("parseval")) rep.suites.push_back(suite_parseval(ts, sieve));
  return rep;
}

// ---------------------------------------------------------------------- scan

std::optional<Regression> linear_regression(std::span<const double> xs,
                                            std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 3) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  Regression r;
  r.n = static_cast<long>(n);
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = ys[i] - (r.intercept + r.slope * xs[i]);
    ss_res += e * e;
  }
  r.r2 = (syy == 0.0) ? 1.0 : 1.0 - ss_res / syy;
  r.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  r.slope_ci95 = 1.96 * r.slope_stderr;
  return r;
}

ScanResult run_scan(const ExperimentConfig& cfg, const SieveTable& sieve) {
  struct Task {
    double x;
    std::uint64_t q;
  };
  std::vector<Task> tasks;
  for (double x : cfg.x_list) {
    for (std::uint64_t q : cfg.resolve_q(x)) tasks.push_back({x, q});
  }

  ScanResult result;
  result.rows.assign(tasks.size(), {});

  auto compute = [&](std::size_t i) {
    const Task& t = tasks[i];
    ScanRow row;
    row.x = t.x;
    row.q = t.q;
    try {
      auto t0 = std::chrono::steady_clock::now();
      APCounts counts = ap_counts(sieve, t.x, t.q);
      auto t1 = std::chrono::steady_clock::now();
      MainTermModel model = MainTermModel::build(t.x, t.q);
      ResidueSpectrum spec = delta_spectrum(counts, model);
      auto t2 = std::chrono::steady_clock::now();
      ClassDecomp decomp = main_and_error(counts, model);

      row.sum_delta_sq = spec.sum_delta_sq();
      row.sum_abs_E = decomp.sum_abs_E();
      double dq = static_cast<double>(t.q);
      row.ratio1 = row.sum_delta_sq / (std::pow(t.x, 1.5) * std::pow(dq, 11.0 / 16.0));
      row.ratio2 = row.sum_abs_E / (std::pow(t.x, 0.75) * std::pow(dq, 11.0 / 32.0));
      double energy = dq * decomp.sum_E_sq();
      row.parseval_rel_err =
          std::abs(energy - row.sum_delta_sq) / std::max(row.sum_delta_sq, 1e-300);
      row.valid = row.parseval_rel_err <= 1e-9 * cfg.tolerance_scale;
      row.t_counts_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      row.t_dft_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    } catch (const std::exception& e) {
      row.valid = false;
      row.error = e.what();
    }
    result.rows[i] = row;
  };

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || tasks.size() < 2) {
    for (std::size_t i = 0; i < tasks.size(); ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        compute(i);
      }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::min<int>(jobs, static_cast<int>(tasks.size())); ++k)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // log-log regressions of sum|Delta|^2: against q at fixed x, and against
  // x at fixed q
  std::map<double, std::vector<std::size_t>> by_x;
  std::map<std::uint64_t, std::vector<std::size_t>> by_q;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const ScanRow& r = result.rows[i];
    if (!r.valid || !(r.sum_delta_sq > 0.0)) continue;
    by_x[r.x].push_back(i);
    by_q[r.q].push_back(i);
  }
  for (const auto& [x, idx] : by_x) {
    std::vector<double> lq, ld;
    for (std::size_t i : idx) {
      lq.push_back(std::log(static_cast<double>(result.rows[i].q)));
      ld.push_back(std::log(result.rows[i].sum_delta_sq));
    }
    if (auto r = linear_regression(lq, ld))
      result.regressions.emplace_back("sum_delta_sq_vs_q@x=" + fmt_g(x), *r);
  }
  for (const auto& [q, idx] : by_q) {
    std::vector<double> lx, ld;
    for (std::size_t i : idx) {
      lx.push_back(std::log(result.rows[i].x));
      ld.push_back(std::log(result.rows[i].sum_delta_sq));
    }
    if (auto r = linear_regression(lx, ld))
      result.regressions.emplace_back("sum_delta_sq_vs_x@q=" + std::to_string(q), *r);
  }
  return result;
}

std::filesystem::path write_scan_csv(const ScanResult& result, const std::filesystem::path& dir) {
  auto path = dir / "scan.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scan_csv: cannot open " + path.string());
  out << "x,q,sum_delta_sq,sum_abs_E,ratio1,ratio2,parseval_rel_err,valid,error\n";
  for (const auto& r : result.rows) {
    out << fmt_g(r.x) << ',' << r.q << ',' << fmt_g(r.sum_delta_sq) << ',' << fmt_g(r.sum_abs_E)
        << ',' << fmt_g(r.ratio1) << ',' << fmt_g(r.ratio2) << ',' << fmt_g(r.parseval_rel_err)
        << ',' << (r.valid ? 1 : 0) << ',' << r.error << '\n';
  }
  return path;
}

std::filesystem::path write_scan_timings_csv(const ScanResult& result,
                                             const std::filesystem::path& dir) {
  auto path = dir / "scan_timings.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_scan_timings_csv: cannot open " + path.string());
  out << "x,q,t_counts_ms,t_dft_ms\n";
  for (const auto& r : result.rows) {
    out << fmt_g(r.x) << ',' << r.q << ',' << fmt_g(r.t_counts_ms, 6) << ','
        << fmt_g(r.t_dft_ms, 6) << '\n';
  }
  return path;
}

namespace {

json regression_to_json(const Regression& r) {
  return {{"slope", r.slope},     {"intercept", r.intercept},
          {"r2", r.r2},           {"slope_stderr", r.slope_stderr},
          {"slope_ci95", r.slope_ci95}, {"n", r.n}};
}

}  // namespace

std::string scan_to_json(const ScanResult& result) {
  json j;
  j["schema_version"] = 1;
  j["rows"] = result.rows.size();
  long valid = 0;
  for (const auto& r : result.rows) valid += r.valid ? 1 : 0;
  j["valid_rows"] = valid;
  j["regressions"] = json::object();
  for (const auto& [name, reg] : result.regressions) j["regressions"][name] = regression_to_json(reg);
  return j.dump(2);
}

// ------------------------------------------------------------------- moments

MomentsResult run_moments(const ExperimentConfig& cfg) {
  MomentsResult out;
  std::vector<double> lq, lv;
  for (std::uint64_t q : cfg.moments.q_list) {
    CharacterTable table = build_characters(static_cast<std::uint32_t>(q));
    MomentReport rep = compute_moment_report(table, cfg.moments.y, cfg.moments.T);
    if (rep.sum_I3_sq > 0.0) {
      lq.push_back(std::log(static_cast<double>(q)));
      lv.push_back(std::log(rep.sum_I3_sq));
    }
    out.reports.push_back(std::move(rep));
  }
  out.lemma7_slope = linear_regression(lq, lv);
  return out;
}

std::string moments_to_json(const MomentsResult& result) {
  json j;
  j["schema_version"] = 1;
  j["reports"] = json::array();
  for (const auto& rep : result.reports) j["reports"].push_back(json::parse(moment_report_to_json(rep)));
  if (result.lemma7_slope)
    j["regression"] = regression_to_json(*result.lemma7_slope);
  else
    j["regression"] = nullptr;
  return j.dump(2);
}

// -------------------------------------------------------------------- kernel

KernelScanOutput run_kernel_scan(const ExperimentConfig& cfg) {
  const KernelConfig& k = cfg.kernel;
  KernelScanOutput out;
  out.T = choose_parameters(k.x, k.q, k.epsilon).T;
  double lo = std::max(1.0, k.n_from * out.T);
  double hi = std::max(lo + 1.0, k.n_to * out.T);
  for (double v = lo; v <= hi; v *= k.n_ratio) {
    auto n = static_cast<std::uint64_t>(std::llround(v));
    if (out.grid.empty() || out.grid.back() != n) out.grid.push_back(n);
  }
  KernelEval kernel;
  SmoothWindow w(k.x, k.Y);
  DecaySettings ds;
  ds.neighborhood = 0.03;
  out.report = decay_scan(kernel, w, k.q, out.grid, ds);
  return out;
}

}  // namespace d3ap
