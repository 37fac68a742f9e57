#include "bosecert/report.hpp"

#include "bosecert/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace bosecert {

using nlohmann::json;

bool SuiteReport::pass() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
}

void SuiteReport::sort_records() {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& x, const auto& y) { return x.check_id < y.check_id; });
}

void SuiteReport::merge(const IdentityReport& rep) {
  records.insert(records.end(), rep.records.begin(), rep.records.end());
  sort_records();
}

void SuiteReport::add(CheckRecord rec) {
  records.push_back(std::move(rec));
  sort_records();
}

const CheckRecord* SuiteReport::find(const std::string& id) const {
  for (const auto& r : records)
    if (r.check_id == id)
      return &r;
  return nullptr;
}

const ReportTable* SuiteReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name)
      return &t;
  return nullptr;
}

ReportFormat parse_format(const std::string& s) {
  if (s == "json")
    return ReportFormat::Json;
  if (s == "csv")
    return ReportFormat::Csv;
  throw ConfigError("unknown report format '" + s + "' (expected json or csv)");
}

namespace {

// JSON has no inf/nan; they travel as strings.
json number(double x) {
  if (std::isfinite(x))
    return x;
  if (std::isnan(x))
    return "nan";
  return x > 0 ? "inf" : "-inf";
}

double number(const json& j) {
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan")
      return std::nan("");
    if (s == "inf")
      return HUGE_VAL;
    if (s == "-inf")
      return -HUGE_VAL;
  }
  throw IoError("expected a number, got " + j.dump());
}

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f)
    throw IoError("cannot open " + p.string() + " for writing");
  f << text;
  f.close();
  if (!f)
    throw IoError("write failed for " + p.string());
}

} // namespace

json report_to_json(const SuiteReport& r) {
  json recs = json::array();
  for (const auto& c : r.records)
    recs.push_back({{"check_id", c.check_id},
                    {"anchor", c.anchor},
                    {"inputs", c.inputs},
                    {"value", number(c.value)},
                    {"residual", number(c.residual)},
                    {"tol", number(c.tol)},
                    {"pass", c.pass}});
  json tabs = json::array();
  for (const auto& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json jr = json::array();
      for (double x : row)
        jr.push_back(number(x));
      rows.push_back(std::move(jr));
    }
    tabs.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  return {{"suite", r.suite},
          {"version", r.version},
          {"seed", r.seed},
          {"pass", r.pass()},
          {"failures", r.failures()},
          {"config", r.config},
          {"summary", r.summary},
          {"records", std::move(recs)},
          {"tables", std::move(tabs)},
          {"timestamp", {{"started", r.started}, {"wall_time_s", number(r.wall_time)}}}};
}

SuiteReport report_from_json(const json& j) {
  try {
    SuiteReport r;
    r.suite = j.at("suite").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = j.value("config", json::object());
    r.summary = j.value("summary", json::object());
    for (const auto& c : j.at("records")) {
      CheckRecord rec;
      rec.check_id = c.at("check_id").get<std::string>();
      rec.anchor = c.at("anchor").get<std::string>();
      rec.inputs = c.at("inputs");
      rec.value = number(c.at("value"));
      rec.residual = number(c.at("residual"));
      rec.tol = number(c.at("tol"));
      rec.pass = c.at("pass").get<bool>();
      r.records.push_back(std::move(rec));
    }
    for (const auto& t : j.at("tables")) {
      ReportTable tab;
      tab.name = t.at("name").get<std::string>();
      tab.columns = t.at("columns").get<std::vector<std::string>>();
      for (const auto& row : t.at("rows")) {
        std::vector<double> v;
        for (const auto& x : row)
          v.push_back(number(x));
        tab.rows.push_back(std::move(v));
      }
      r.tables.push_back(std::move(tab));
    }
    const auto& ts = j.at("timestamp");
    r.started = ts.at("started").get<std::string>();
    r.wall_time = number(ts.at("wall_time_s"));
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

std::string report_json_text(const SuiteReport& r) { return report_to_json(r).dump(2) + "\n"; }

std::string records_csv(const std::vector<CheckRecord>& records) {
  std::ostringstream os;
  os << "check_id,anchor,value,residual,tol,pass,inputs\n";
  for (const auto& c : records)
    os << csv_field(c.check_id) << ',' << csv_field(c.anchor) << ',' << format_double(c.value)
       << ',' << format_double(c.residual) << ',' << format_double(c.tol) << ','
       << (c.pass ? "true" : "false") << ',' << csv_field(c.inputs.dump()) << '\n';
  return os.str();
}

std::string table_csv(const ReportTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> emit_report(const SuiteReport& r,
                                               const std::filesystem::path& dir,
                                               ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::Json) {
    written.push_back(dir / (r.suite + ".json"));
    write_file(written.back(), report_json_text(r));
    return written;
  }
  written.push_back(dir / (r.suite + ".csv"));
  write_file(written.back(), records_csv(r.records));
  for (const auto& t : r.tables) {
    written.push_back(dir / (r.suite + "-" + t.name + ".csv"));
    write_file(written.back(), table_csv(t));
  }
  return written;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace bosecert
