#include "bosecert/config.hpp"
#include "bosecert/errors.hpp"
#include "bosecert/report.hpp"
#include "bosecert/suites.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace bosecert;
namespace fs = std::filesystem;

namespace {

SuiteReport sample_report() {
  SuiteReport r;
  r.suite = "demo";
  r.seed = 18446744073709551557ull;
  r.config = {{"K", 10.0}};
  r.add({"b.check", "anchor-b", {{"x", 1.5}}, 0.1, 1e-9, 1e-6, true});
  r.add({"a.check", "anchor, with \"quotes\"", {}, -3.0, 2.0, 1.0, false});
  r.add({"c.nonfinite", "anchor-c", {}, std::numeric_limits<double>::infinity(),
         std::nan(""), 0.0, false});
  r.tables.push_back({"grid", {"kx", "F"}, {{0.0, 1.0}, {0.5, -2.25}}});
  r.summary = {{"note", "x"}};
  r.started = "2026-01-01T00:00:00Z";
  r.wall_time = 1.25;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("bosecert_" + name);
  fs::remove_all(d);
  return d;
}

} // namespace

TEST_CASE("records stay sorted and overall pass requires every record") {
  auto r = sample_report();
  CHECK(r.records.front().check_id == "a.check");
  CHECK(r.records.back().check_id == "c.nonfinite");
  CHECK_FALSE(r.pass());
  CHECK(r.failures() == 2);
  SuiteReport ok;
  ok.add({"x", "y", {}, 0, 0, 1, true});
  CHECK(ok.pass());
  CHECK(SuiteReport{}.pass());
}

TEST_CASE("JSON round trip preserves every field") {
  const auto r = sample_report();
  const auto back = report_from_json(nlohmann::json::parse(report_json_text(r)));
  CHECK(back.suite == r.suite);
  CHECK(back.seed == r.seed);
  REQUIRE(back.records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto &x = r.records[i], &y = back.records[i];
    CHECK(x.check_id == y.check_id);
    CHECK(x.anchor == y.anchor);
    CHECK(x.inputs == y.inputs);
    CHECK(x.pass == y.pass);
    CHECK(x.tol == y.tol);
    if (std::isnan(x.residual))
      CHECK(std::isnan(y.residual));
    else
      CHECK(x.residual == y.residual);
    CHECK(x.value == y.value);
  }
  CHECK(back.tables == r.tables);
  CHECK(back.summary == r.summary);
  CHECK(back.started == r.started);
  CHECK(back.wall_time == r.wall_time);
}

TEST_CASE("round trip of a finite report compares equal as a whole") {
  auto r = sample_report();
  r.records.pop_back();
  CHECK(report_from_json(report_to_json(r)) == r);
}

TEST_CASE("malformed report JSON raises IoError") {
  CHECK_THROWS_AS(report_from_json(nlohmann::json::parse(R"({"suite": "x"})")), IoError);
}

TEST_CASE("CSV has one row per record and quotes awkward fields") {
  const auto r = sample_report();
  const auto csv = records_csv(r.records);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "check_id,anchor,value,residual,tol,pass,inputs");
  std::getline(is, line);
  CHECK(line.rfind("a.check,\"anchor, with \"\"quotes\"\"\",-3,2,1,false,", 0) == 0);
  int rows = 0;
  std::istringstream all(csv);
  while (std::getline(all, line))
    ++rows;
  CHECK(rows == 1 + 3);
}

TEST_CASE("empty record list gives a header-only CSV") {
  CHECK(records_csv({}) == "check_id,anchor,value,residual,tol,pass,inputs\n");
}

TEST_CASE("table CSV uses the table columns") {
  const ReportTable t{"certificate", {"kx", "ky", "kz", "F", "margin"}, {{0, 0, 1.5, 0.25, 2}}};
  CHECK(table_csv(t) == "kx,ky,kz,F,margin\n0,0,1.5,0.25,2\n");
}

TEST_CASE("emit_report writes suite-named files") {
  const auto dir = scratch_dir("emit");
  const auto r = sample_report();
  const auto js = emit_report(r, dir, ReportFormat::Json);
  REQUIRE(js.size() == 1);
  CHECK(js[0].filename() == "demo.json");
  CHECK(report_from_json(nlohmann::json::parse(slurp(js[0]))).records.size() == 3);
  const auto cs = emit_report(r, dir, ReportFormat::Csv);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].filename() == "demo.csv");
  CHECK(cs[1].filename() == "demo-grid.csv");
  CHECK(slurp(cs[1]).rfind("kx,F\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("emit_report into an unusable path raises IoError") {
  const auto dir = scratch_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(emit_report(sample_report(), dir / "file" / "sub", ReportFormat::Json), IoError);
  fs::remove_all(dir);
}

TEST_CASE("format names") {
  CHECK(parse_format("json") == ReportFormat::Json);
  CHECK(parse_format("csv") == ReportFormat::Csv);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

// ---- config ----------------------------------------------------------------------------

TEST_CASE("config parses the key-value format") {
  const auto cfg = parse_config(R"(
# geometry
potential = {kind: "square-well", v0: 3.5, R: 0.75}
rho_a3 = 1e-7   # trailing comment
K = 8
K_list = 5, 8, 12
seed = 18446744073709551557
potsplit_cases = 2x2, 3x2
tol.potsplit = 1e-11
strict_gap = true
)");
  CHECK(cfg.potential.kind == "square-well");
  CHECK(cfg.potential.v0 == 3.5);
  CHECK(cfg.potential.R == 0.75);
  CHECK(cfg.rho_a3 == 1e-7);
  CHECK(cfg.K == 8.0);
  CHECK(cfg.K_list == std::vector<double>{5, 8, 12});
  CHECK(cfg.seed == 18446744073709551557ull);
  CHECK(cfg.potsplit_cases.size() == 2);
  CHECK(cfg.tol.potsplit == 1e-11);
  CHECK(cfg.strict_gap);
  CHECK(cfg.to_json()["seed"].get<std::uint64_t>() == cfg.seed);
}

TEST_CASE("config errors name the line") {
  CHECK_THROWS_AS(parse_config("nonsense_key = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("K 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("K = three"), ConfigError);
  CHECK_THROWS_AS(parse_config("potential = {kind: \"square-well\", depth: 2}"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = -4"), ConfigError);
  try {
    parse_config("\n\nK = x");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/bosecert.cfg"), ConfigError);
}

namespace {

std::string rejection(const std::string& text) {
  try {
    prepare_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("validation rejects the geometric conditions with named messages") {
  CHECK(rejection("").empty());
  // ρa³ = 10⁻² makes ℓ ≈ 1.2 < 2R
  CHECK(rejection("rho_a3 = 1e-2").find("R <= ell/2") != std::string::npos);
  CHECK(rejection("L_over_ell = 2").find("2*ell < L") != std::string::npos);
  CHECK(rejection("Xi = 2.5").find("Xi >= 3") != std::string::npos);
  CHECK(rejection("kappa = 0.7").find("kappa in (0, 2/3)") != std::string::npos);
  CHECK(rejection("kappa = 0").find("kappa in (0, 2/3)") != std::string::npos);
  CHECK(rejection("tol.ed = 0").find("tolerances must be positive") != std::string::npos);
  CHECK(rejection("sweep_rho_a3 = ,").find("non-empty") != std::string::npos);
}

TEST_CASE("unknown suite is a configuration error") {
  CHECK_THROWS_AS(run_suite("nope", RunConfig{}), ConfigError);
}

TEST_CASE("scatter suite is deterministic apart from the timestamp") {
  RunConfig cfg;
  auto a = run_suite("scatter", cfg);
  auto b = run_suite("scatter", cfg);
  CHECK(a.pass());
  CHECK(a.seed == cfg.seed);
  auto ja = report_to_json(a), jb = report_to_json(b);
  ja.erase("timestamp");
  jb.erase("timestamp");
  CHECK(ja.dump() == jb.dump());
  for (std::size_t i = 1; i < a.records.size(); ++i)
    CHECK(a.records[i - 1].check_id < a.records[i].check_id);
}

TEST_CASE("combined report has a section per suite") {
  SuiteReport x, y;
  x.suite = "scatter";
  x.add({"scatter.one", "a", {}, 0, 0, 1, true});
  x.tables.push_back({"profile", {"r"}, {{1.0}}});
  y.suite = "ed";
  y.add({"ed.one", "b", {}, 0, 2, 1, false});
  const auto all = combine_reports({x, y}, RunConfig{});
  CHECK(all.suite == "all");
  CHECK(all.records.size() == 2);
  CHECK(all.summary["sections"].contains("scatter"));
  CHECK(all.summary["sections"].contains("ed"));
  CHECK(all.summary["sections"]["ed"]["pass"] == false);
  CHECK(all.table("scatter-profile") != nullptr);
  CHECK_FALSE(all.pass());
}
