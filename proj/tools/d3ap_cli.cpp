#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "d3ap/experiments.hpp"
#include "d3ap/format.hpp"
#include "d3ap/mainterm.hpp"
#include "d3ap/sieve_cache.hpp"
#include "d3ap/voronoi.hpp"

namespace fs = std::filesystem;
using namespace d3ap;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string sieve_cache_dir;
  int jobs = 0;
  double tolerance_scale = 0.0;
};

ExperimentConfig load_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = ExperimentConfig::from_json_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.sieve_cache_dir.empty()) cfg.sieve_cache_dir = opts.sieve_cache_dir;
  if (opts.jobs > 0) cfg.jobs = opts.jobs;
  if (opts.tolerance_scale > 0.0) cfg.tolerance_scale = opts.tolerance_scale;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

int cmd_verify(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  CachedSieve sieve = load_or_build_sieve(verify_sieve_limit(), cfg.sieve_cache_dir);
  VerifyReport rep = run_verify(cfg, sieve.table);
  write_text(fs::path(cfg.out_dir) / "verify_report.json", rep.to_json());
  for (const auto& s : rep.suites) {
    std::cout << (s.passed() ? "PASS" : "FAIL") << "  " << s.name << "  (" << s.cases
              << " cases, " << s.failures.size() << " failures)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(s.failures.size(), 5); ++i) {
      const auto& f = s.failures[i];
      std::cout << "      " << f.lemma << " [" << f.params << "] got=" << fmt_g(f.got)
                << " want=" << fmt_g(f.want) << " tol=" << fmt_g(f.tolerance) << "\n";
    }
  }
  std::cout << (rep.all_passed() ? "verify: all identities hold\n"
                                 : "verify: identity failures detected\n");
  return rep.all_passed() ? static_cast<int>(ExitCode::ok)
                          : static_cast<int>(ExitCode::identity_failure);
}

int cmd_scan(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  double max_x = 0.0;
  for (double x : cfg.x_list) max_x = std::max(max_x, x);
  auto limit = static_cast<std::uint64_t>(std::ceil(2.0 * max_x));
  CachedSieve sieve = load_or_build_sieve(limit, cfg.sieve_cache_dir);
  ScanResult res = run_scan(cfg, sieve.table);
  auto csv = write_scan_csv(res, cfg.out_dir);
  write_scan_timings_csv(res, cfg.out_dir);
  write_text(fs::path(cfg.out_dir) / "scan.json", scan_to_json(res));
  long valid = 0;
  for (const auto& r : res.rows) valid += r.valid ? 1 : 0;
  std::cout << "scan: " << res.rows.size() << " rows (" << valid << " Parseval-valid) -> "
            << csv.string() << "\n";
  for (const auto& [name, reg] : res.regressions) {
    std::cout << "  " << name << ": slope=" << fmt_g(reg.slope, 6) << " +- "
              << fmt_g(reg.slope_ci95, 3) << " (r2=" << fmt_g(reg.r2, 4) << ")\n";
  }
  return valid == static_cast<long>(res.rows.size())
             ? static_cast<int>(ExitCode::ok)
             : static_cast<int>(ExitCode::identity_failure);
}

int cmd_moments(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  MomentsResult res = run_moments(cfg);
  write_text(fs::path(cfg.out_dir) / "moments.json", moments_to_json(res));
  std::cout << "moments: " << res.reports.size() << " moduli -> "
            << (fs::path(cfg.out_dir) / "moments.json").string() << "\n";
  if (res.lemma7_slope)
    std::cout << "  log-log slope of sum (I3)^2 vs q: " << fmt_g(res.lemma7_slope->slope, 6)
              << " +- " << fmt_g(res.lemma7_slope->slope_ci95, 3) << "\n";
  return static_cast<int>(ExitCode::ok);
}

int cmd_kernel(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts);
  KernelScanOutput out = run_kernel_scan(cfg);
  auto csv = write_kernel_csv(out.report, cfg.kernel.x, cfg.kernel.q, cfg.out_dir);
  std::cout << "kernel: T = " << fmt_g(out.T, 6) << ", " << out.report.rows.size()
            << " grid points -> " << csv.string() << "\n";
  for (const auto& r : out.report.rows) {
    std::cout << "  n=" << r.n << " |w_hat|~" << fmt_g(r.envelope, 4)
              << " exponent=" << fmt_g(r.exponent, 4) << (r.ok ? "" : "  [budget]") << "\n";
  }
  return static_cast<int>(ExitCode::ok);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for the ternary divisor function in prime arithmetic progressions"};
  app.require_subcommand(1);

  CommonOpts opts;
  for (auto* sub : {app.add_subcommand("verify", "run the exact-identity suites"),
                    app.add_subcommand("scan", "spectrum/error scan over (x, q) pairs"),
                    app.add_subcommand("moments", "Dirichlet L-function moment integrals"),
                    app.add_subcommand("kernel", "oscillatory kernel decay scan")}) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--sieve-cache", opts.sieve_cache_dir, "sieve cache directory");
    sub->add_option("--jobs", opts.jobs, "worker threads for scan rows");
    sub->add_option("--tolerance-scale", opts.tolerance_scale, "scale all tolerances");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? static_cast<int>(ExitCode::config_error) : 0;
  }

  try {
    if (app.got_subcommand("verify")) return cmd_verify(opts);
    if (app.got_subcommand("scan")) return cmd_scan(opts);
    if (app.got_subcommand("moments")) return cmd_moments(opts);
    if (app.got_subcommand("kernel")) return cmd_kernel(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: allocation failed\n";
    return static_cast<int>(ExitCode::resource_error);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::resource_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::identity_failure);
  }
  return static_cast<int>(ExitCode::config_error);
}
