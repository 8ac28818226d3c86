#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "d3ap/experiments.hpp"
#include "d3ap/expsum.hpp"
#include "d3ap/kahan.hpp"
#include "d3ap/mainterm.hpp"
#include "test_support.hpp"

using namespace d3ap;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("choose_parameters") {
  // x = q clamps Y to x
  Params p = choose_parameters(100.0, 97, 0.1);
  CHECK(p.Y <= 100.0);
  CHECK(p.Y >= 97.0);

  Params p2 = choose_parameters(1e8, 1000, 0.0);
  CHECK(p2.Y == doctest::Approx(1e6 * std::pow(1e3, 11.0 / 32.0)).epsilon(1e-12));
  // epsilon = 0: T = (xq/Y)^3 / x
  CHECK(p2.T == doctest::Approx(std::pow(1e8 * 1e3 / p2.Y, 3.0) / 1e8).epsilon(1e-12));

  CHECK_THROWS_AS(choose_parameters(10.0, 11, 0.1), std::invalid_argument);
}

TEST_CASE("config parsing, defaults and validation") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text("{}");
  CHECK(cfg.schema_version == 1);
  CHECK(cfg.epsilon == 0.1);

  // composite q rejected naming the field
  try {
    ExperimentConfig::from_json_text(R"({"q_rule":{"kind":"list","q_list":[4]}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "q_rule.q_list");
  }

  try {
    ExperimentConfig::from_json_text(R"({"x_list":[1.0]})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "x_list");
  }

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{nonsense"), ConfigError);

  ExperimentConfig near = ExperimentConfig::from_json_text(
      R"({"q_rule":{"kind":"near_theta","theta_list":[0.5]},"x_list":[10000.0]})");
  auto qs = near.resolve_q(10000.0);
  REQUIRE(qs.size() == 1);
  CHECK(is_prime(qs[0]));
  CHECK(std::abs(static_cast<double>(qs[0]) - 100.0) <= 3.0);

  ExperimentConfig range = ExperimentConfig::from_json_text(
      R"({"q_rule":{"kind":"range_primes","q_min":10,"q_max":30}})");
  CHECK(range.resolve_q(100.0) == std::vector<std::uint64_t>{11, 13, 17, 19, 23, 29});
}

TEST_CASE("verify: clean run passes, fault injection fails naming lemma3") {
  const SieveTable& sv = d3ap_test::sieve();

  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"verify":{"suites":["lemma3","parseval"]}})");
  VerifyReport rep = run_verify(cfg, sv);
  CHECK(rep.all_passed());
  REQUIRE(rep.suites.size() == 2);
  CHECK(rep.suites[0].name == "lemma3");
  CHECK(rep.suites[0].cases > 0);

  ExperimentConfig faulty = ExperimentConfig::from_json_text(
      R"({"verify":{"suites":["lemma3"],"inject_fault":"kloosterman_sign"}})");
  VerifyReport bad = run_verify(faulty, sv);
  CHECK_FALSE(bad.all_passed());
  bool named = false;
  for (const auto& s : bad.suites) {
    for (const auto& f : s.failures) {
      if (f.lemma.find("lemma3") != std::string::npos) named = true;
    }
  }
  CHECK(named);

  // empty suite selection: empty report, passes
  ExperimentConfig empty = ExperimentConfig::from_json_text(R"({"verify":{"suites":[]}})");
  VerifyReport er = run_verify(empty, sv);
  CHECK(er.suites.empty());
  CHECK(er.all_passed());
  CHECK(er.to_json().find("\"all_passed\": true") != std::string::npos);
}

TEST_CASE("scan row against brute-force defining sums") {
  const SieveTable& sv = d3ap_test::sieve();
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"x_list":[10000.0],"q_rule":{"kind":"list","q_list":[101]}})");
  ScanResult res = run_scan(cfg, sv);
  REQUIRE(res.rows.size() == 1);
  const ScanRow& row = res.rows[0];
  CHECK(row.valid);

  // brute force both sides from the defining sums
  const std::uint64_t q = 101;
  const double x = 10000.0;
  MainTermModel model = MainTermModel::build(x, q);
  double brute_delta_sq = 0.0;
  for (std::uint64_t r = 1; r <= q; ++r) {
    KahanCSum acc;
    for (std::uint64_t n = 10001; n <= 20000; ++n) {
      double ang = 2.0 * std::numbers::pi * static_cast<double>(n % q * r % q) / q;
      acc.add(static_cast<double>(sv.d3[n]) * cplx(std::cos(ang), std::sin(ang)));
    }
    brute_delta_sq += std::norm(acc.value() - cplx(r == q ? model.F1 : model.Fq, 0.0));
  }
  CHECK(row.sum_delta_sq == doctest::Approx(brute_delta_sq).epsilon(1e-9));

  double brute_abs_E = 0.0;
  for (std::uint64_t a = 1; a <= q; ++a) {
    double cnt = 0.0;
    for (std::uint64_t n = 10001; n <= 20000; ++n)
      if (n % q == a % q) cnt += sv.d3[n];
    double cqa = (a == q) ? static_cast<double>(q - 1) : -1.0;
    brute_abs_E += std::abs(cnt - (model.F1 + cqa * model.Fq) / static_cast<double>(q));
  }
  CHECK(row.sum_abs_E == doctest::Approx(brute_abs_E).epsilon(1e-9));
}

TEST_CASE("scan: degenerate q > 2x rows stay valid") {
  const SieveTable& sv = d3ap_test::sieve();
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"x_list":[30.0],"q_rule":{"kind":"list","q_list":[997]}})");
  ScanResult res = run_scan(cfg, sv);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].valid);
}

TEST_CASE("scan determinism: identical outputs on rerun") {
  const SieveTable& sv = d3ap_test::sieve();
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"x_list":[500.0,1000.0],"q_rule":{"kind":"range_primes","q_min":3,"q_max":31},"jobs":3})");

  fs::path dir1 = fs::temp_directory_path() / "d3ap_scan1";
  fs::path dir2 = fs::temp_directory_path() / "d3ap_scan2";
  fs::create_directories(dir1);
  fs::create_directories(dir2);

  ScanResult r1 = run_scan(cfg, sv);
  ScanResult r2 = run_scan(cfg, sv);
  write_scan_csv(r1, dir1);
  write_scan_csv(r2, dir2);
  CHECK(slurp(dir1 / "scan.csv") == slurp(dir2 / "scan.csv"));
  CHECK(scan_to_json(r1) == scan_to_json(r2));

  // regressions exist for each fixed x (>= 3 q values) and each fixed q
  bool has_q_slope = false;
  for (const auto& [name, reg] : r1.regressions) {
    if (name.find("vs_q@") != std::string::npos) {
      has_q_slope = true;
      CHECK(reg.n >= 3);
    }
  }
  CHECK(has_q_slope);

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("linear regression against a known line") {
  std::vector<double> xs{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 + 0.5 * x);
  auto r = linear_regression(xs, ys);
  REQUIRE(r.has_value());
  CHECK(r->slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r->intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r->r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r->slope_stderr < 1e-12);

  CHECK_FALSE(linear_regression(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0})
                  .has_value());
}

TEST_CASE("moments runner emits reports and regression") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"moments":{"q_list":[3,5,7],"T":5.0,"y":1.0}})");
  MomentsResult res = run_moments(cfg);
  REQUIRE(res.reports.size() == 3);
  CHECK(res.reports[0].q == 3);
  CHECK(res.lemma7_slope.has_value());
  std::string js = moments_to_json(res);
  CHECK(js.find("\"regression\"") != std::string::npos);
  CHECK(js.find("\"reports\"") != std::string::npos);
}

TEST_CASE("errors csv interface") {
  const SieveTable& sv = d3ap_test::sieve();
  APCounts counts = ap_counts(sv, 50.0, 7);
  MainTermModel model = MainTermModel::build(50.0, 7);
  ClassDecomp decomp = main_and_error(counts, model);
  fs::path dir = fs::temp_directory_path() / "d3ap_errors_test";
  fs::create_directories(dir);
  fs::path file = write_errors_csv(counts, decomp, dir);
  CHECK(file.filename().string() == "errors_x50_q7.csv");
  std::string text = slurp(file);
  CHECK(text.rfind("a,count,M,E\n", 0) == 0);
  fs::remove_all(dir);
}
