#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d3ap/arith.hpp"
#include "d3ap/lfunctions.hpp"
#include "d3ap/voronoi.hpp"

namespace d3ap {

enum class ExitCode : int {
  ok = 0,
  identity_failure = 1,
  config_error = 2,
  resource_error = 3,
};

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& what_)
      : std::runtime_error("config field '" + field_ + "': " + what_), field(std::move(field_)) {}
};

struct QRule {
  enum class Kind { list, range_primes, near_theta };
  Kind kind = Kind::list;
  std::vector<std::uint64_t> list{3, 7, 31};
  std::uint64_t q_min = 0;
  std::uint64_t q_max = 0;
  std::vector<double> theta_list;
};

struct VerifyConfig {
  std::vector<std::string> suites{"all"};
  std::string inject_fault = "none";  // none | kloosterman_sign (test seam)
};

struct MomentsConfig {
  std::vector<std::uint64_t> q_list{3, 5, 7, 11, 13};
  double T = 10.0;
  double y = 1.0;
};

struct KernelConfig {
  double x = 500.0;
  double Y = 100.0;
  std::uint64_t q = 5;
  double epsilon = 0.1;
  double n_from = 0.5;   // grid start as a multiple of the cutoff T
  double n_to = 5.0;     // grid end as a multiple of T
  double n_ratio = 1.45; // geometric step
};

struct ExperimentConfig {
  int schema_version = 1;
  std::vector<double> x_list{10000.0};
  QRule q_rule;
  double epsilon = 0.1;
  bool y_optimal = true;  // Y = x^{3/4} q^{11/32} clamped to [q, x]
  double y_fixed = 0.0;
  std::string sieve_cache_dir = ".";
  std::string out_dir = ".";
  double tolerance_scale = 1.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  VerifyConfig verify;
  MomentsConfig moments;
  KernelConfig kernel;

  std::vector<std::uint64_t> resolve_q(double x) const;
  void validate() const;  // throws ConfigError naming the offending field

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
};

struct Params {
  double Y = 0.0;
  double T = 0.0;
};

// Y = x^{3/4} q^{11/32} clamped to [q, x]; T = (xq/Y)^3 x^{epsilon-1}.
Params choose_parameters(double x, std::uint64_t q, double epsilon);

// -------------------------------------------------------------------- verify

struct VerifyFailure {
  std::string lemma;
  std::string params;
  double got = 0.0;
  double want = 0.0;
  double tolerance = 0.0;
};

struct SuiteResult {
  std::string name;
  long cases = 0;
  std::vector<VerifyFailure> failures;
  bool passed() const { return failures.empty(); }
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
  std::string to_json() const;
};

// Sieve limit the verify suites require.
std::uint64_t verify_sieve_limit();

VerifyReport run_verify(const ExperimentConfig& cfg, const SieveTable& sieve);

// ---------------------------------------------------------------------- scan

struct ScanRow {
  double x = 0.0;
  std::uint64_t q = 0;
  double sum_delta_sq = 0.0;
  double sum_abs_E = 0.0;
  double ratio1 = 0.0;  // sum|Delta|^2 / (x^{3/2} q^{11/16})
  double ratio2 = 0.0;  // sum|E| / (x^{3/4} q^{11/32})
  double parseval_rel_err = 0.0;
  bool valid = false;
  std::string error;
  double t_counts_ms = 0.0;
  double t_dft_ms = 0.0;
};

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  double slope_ci95 = 0.0;
  long n = 0;
};

std::optional<Regression> linear_regression(std::span<const double> xs,
                                            std::span<const double> ys);

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<std::pair<std::string, Regression>> regressions;
};

ScanResult run_scan(const ExperimentConfig& cfg, const SieveTable& sieve);

std::filesystem::path write_scan_csv(const ScanResult& result, const std::filesystem::path& dir);
std::filesystem::path write_scan_timings_csv(const ScanResult& result,
                                             const std::filesystem::path& dir);
std::string scan_to_json(const ScanResult& result);

// ------------------------------------------------------------------- moments

struct MomentsResult {
  std::vector<MomentReport> reports;
  std::optional<Regression> lemma7_slope;  // log sum_I3_sq vs log q
};

MomentsResult run_moments(const ExperimentConfig& cfg);
std::string moments_to_json(const MomentsResult& result);

// -------------------------------------------------------------------- kernel

struct KernelScanOutput {
  DecayReport report;
  double T = 0.0;
  std::vector<std::uint64_t> grid;
};

KernelScanOutput run_kernel_scan(const ExperimentConfig& cfg);

}  // namespace d3ap
