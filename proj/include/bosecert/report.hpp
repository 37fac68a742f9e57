#pragma once

#include "bosecert/check.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace bosecert {

inline constexpr const char* toolkit_version = "0.3.0";

// Numeric table attached to a suite, written as `<suite>-<name>.csv`.
struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const ReportTable&) const = default;
};

struct SuiteReport {
  std::string suite;
  std::string version = toolkit_version;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckRecord> records;
  std::vector<ReportTable> tables;
  nlohmann::json summary = nlohmann::json::object();
  // Only these two fields may differ between reruns of the same config.
  std::string started;
  double wall_time = 0.0;

  bool pass() const;
  std::size_t failures() const;
  // Appends the records of `rep`; records stay sorted by check_id.
  void merge(const IdentityReport& rep);
  void add(CheckRecord rec);
  void sort_records();
  const CheckRecord* find(const std::string& id) const;
  const ReportTable* table(const std::string& name) const;

  bool operator==(const SuiteReport&) const = default;
};

enum class ReportFormat { Json, Csv };
ReportFormat parse_format(const std::string& s);

nlohmann::json report_to_json(const SuiteReport& r);
SuiteReport report_from_json(const nlohmann::json& j);
std::string report_json_text(const SuiteReport& r);

std::string records_csv(const std::vector<CheckRecord>& records);
std::string table_csv(const ReportTable& t);

// Writes `<suite>.json`, or `<suite>.csv` plus one `<suite>-<table>.csv` per table.
// Returns the files written. Throws IoError.
std::vector<std::filesystem::path> emit_report(const SuiteReport& r,
                                               const std::filesystem::path& dir,
                                               ReportFormat format);

// UTC ISO-8601 time with second resolution.
std::string utc_timestamp();

} // namespace bosecert
