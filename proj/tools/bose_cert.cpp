// bose-cert: runs verification suites and writes their reports.
//
//   bose-cert <suite> --config <path> [--parallel] [--format json|csv] [--out <dir>] [--sweep]
//
// Exit status: 0 every check passed, 1 some check failed, 2 configuration error,
// 3 internal error.

#include "bosecert/errors.hpp"
#include "bosecert/suites.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

enum Exit { Pass = 0, CheckFailure = 1, BadConfig = 2, Internal = 3 };

std::string suite_list() {
  std::string s;
  for (const auto& n : bosecert::suite_names())
    s += n + ", ";
  return s + "all";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certificates for the dilute Bose gas energy estimates", "bose-cert"};
  std::string suite, config_path, format = "json", out_dir;
  bool parallel = false, sweep = false, quiet = false;
  app.add_option("suite", suite, "Suite to run: " + suite_list())->required();
  app.add_option("--config", config_path,
                 "Config file (default: $BOSE_CERT_CONFIG, else built-in defaults)");
  app.add_option("--format", format, "Report format: json or csv");
  app.add_option("--out", out_dir, "Output directory (default: output_dir from the config)");
  app.add_flag("--parallel", parallel, "Run the suites of `all` concurrently");
  app.add_flag("--sweep", sweep, "bogoliubov: every diluteness value in sweep_rho_a3");
  app.add_flag("-q,--quiet", quiet, "Only print the overall verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BadConfig;
  }

  using namespace bosecert;
  std::vector<SuiteReport> reports;
  RunConfig cfg;
  ReportFormat fmt{};
  try {
    fmt = parse_format(format);
    if (config_path.empty())
      if (const char* env = std::getenv("BOSE_CERT_CONFIG"); env && *env)
        config_path = env;
    if (!config_path.empty())
      cfg = load_config(config_path);
    if (!out_dir.empty())
      cfg.output_dir = out_dir;

    SuiteOptions opts;
    opts.parallel = parallel;
    opts.sweep = sweep;
    if (suite == "all") {
      // Individual suite files plus the combined report.
      reports = run_all(cfg, opts);
      reports.push_back(combine_reports(reports, cfg));
    } else {
      reports.push_back(run_suite(suite, cfg, opts));
    }
  } catch (const ConfigError& e) {
    std::cerr << "bose-cert: " << e.what() << "\n";
    return BadConfig;
  } catch (const std::exception& e) {
    std::cerr << "bose-cert: internal error: " << e.what() << "\n";
    return Internal;
  }

  try {
    for (const auto& r : reports)
      for (const auto& p : emit_report(r, cfg.output_dir, fmt))
        if (!quiet)
          std::cout << "wrote " << p.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "bose-cert: " << e.what() << "\n";
    return Internal;
  }

  const auto& top = reports.back();
  if (!quiet)
    for (const auto& r : top.records)
      if (!r.pass)
        std::cout << "FAIL " << r.check_id << "  value=" << r.value << " residual=" << r.residual
                  << " tol=" << r.tol << "\n";
  std::cout << top.suite << ": " << (top.records.size() - top.failures()) << "/"
            << top.records.size() << " checks passed in " << top.wall_time << " s\n";
  return top.pass() ? Pass : CheckFailure;
}
