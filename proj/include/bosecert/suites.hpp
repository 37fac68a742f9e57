#pragma once

#include "bosecert/config.hpp"
#include "bosecert/report.hpp"

#include <string>
#include <vector>

namespace bosecert {

// Individual suites in the order `all` runs them.
const std::vector<std::string>& suite_names();

struct SuiteOptions {
  bool sweep = false;    // bogoliubov: every value in sweep_rho_a3 instead of rho_a3
  bool parallel = false; // all: run suites concurrently
};

// Config validation plus the geometry conditions that need the scattering length.
// Throws ConfigError.
void prepare_config(const RunConfig& cfg);

// Runs one suite, or `all`. A failing section is recorded as a failed check and the remaining
// sections still run. Throws ConfigError for an unknown name or an invalid config.
SuiteReport run_suite(const std::string& name, const RunConfig& cfg,
                      const SuiteOptions& opts = {});

// `all` as separate per-suite reports, in suite_names() order.
std::vector<SuiteReport> run_all(const RunConfig& cfg, const SuiteOptions& opts = {});

// Concatenates suite reports into one `all` report with a section summary per suite.
SuiteReport combine_reports(const std::vector<SuiteReport>& parts, const RunConfig& cfg);

} // namespace bosecert
