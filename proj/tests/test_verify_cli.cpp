#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "polyext/radial_field.hpp"
#include "polyext/report.hpp"
#include "polyext/suite.hpp"

using namespace polyext;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("polyext_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(POLYEXT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool has_problem(const ConfigError& e, const std::string& prefix) {
  for (const auto& p : e.problems())
    if (p.rfind(prefix, 0) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("defaults cover every group in canonical order") {
  const auto c = SuiteConfig::defaults();
  CHECK(c.groups == known_groups());
  CHECK(c.tol_scale == 1.0);
  CHECK(c.exec == Exec::serial);
  CHECK(c.tol("energy") == doctest::Approx(1e-2));
  const auto scaled = SuiteConfig::from_json({{"tol_scale", 10.0}});
  CHECK(scaled.tol("energy") == doctest::Approx(0.1));
  CHECK_THROWS(c.tol("no_such_class"));
}

TEST_CASE("invalid configurations report their paths") {
  try {
    SuiteConfig::from_json(json::parse(R"({"energy": {"cases": [{"family": "gaussian", "n": 2, "s": 1.2}]}})"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_problem(e, "$.energy.cases[0]"));
  }
  try {
    SuiteConfig::from_json(json::parse(
        R"({"bogus": 1, "groups": ["kernel", "nope"], "tol_scale": -1,
            "hardy": {"params": [{"n": 2, "k": 2, "a": 0, "b": 0}]}, "dtn": {"j_first": 5, "j_last": 4}})"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_problem(e, "$.bogus"));
    CHECK(has_problem(e, "$.groups[1]"));
    CHECK(has_problem(e, "$.tol_scale"));
    CHECK(has_problem(e, "$.hardy.params[0]"));
    CHECK(has_problem(e, "$.dtn"));
  }
  CHECK_THROWS_AS(SuiteConfig::from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(SuiteConfig::from_json({{"limits", {{"extra", 1}}}}), ConfigError);
  CHECK_THROWS_AS(SuiteConfig::from_json({{"limits", {{"cases", {{{"family", "gaussian"}, {"n", 4}, {"s", 1.5}, {"m", 2}}}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(SuiteConfig::from_file((scratch() / "missing.json").string()), ConfigError);
  CHECK_THROWS_AS(run_group("nope", SuiteConfig::defaults()), ConfigError);
}

TEST_CASE("empty group list gives an empty report") {
  const auto r = run_suite(SuiteConfig::from_json({{"groups", json::array()}}));
  CHECK(r.total() == 0);
  CHECK(r.passed() == 0);
  CHECK(r.failed() == 0);
  const auto j = to_json(r);
  CHECK(j["summary"]["total"] == 0);
  CHECK(j["checks"].empty());
}

TEST_CASE("default suite passes with at least 40 checks") {
  const auto r = run_suite(SuiteConfig::defaults());
  CHECK(r.total() >= 40);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name << " measured " << c.measured << " " << c.note);
  CHECK(r.passed() + r.failed() == r.total());
  CHECK(r.group_seconds.size() == known_groups().size());
  const auto j = to_json(r);
  CHECK(j["summary"]["passed"].get<std::size_t>() == r.passed());
  CHECK(j["config"] == SuiteConfig::defaults().doc);
}

TEST_CASE("numeric failures become failed checks") {
  // the zero family has no majorant ladder to normalise by
  const auto c = SuiteConfig::from_json(
      {{"groups", {"dtn"}}, {"dtn", {{"cases", {{{"family", "zero"}, {"n", 2}, {"s", 0.5}}}}}}});
  const auto r = run_suite(c);
  REQUIRE(r.total() >= 2);
  bool noted = false;
  for (const auto& v : r.checks)
    if (!v.pass && !v.note.empty()) noted = std::isnan(v.measured);
  CHECK(noted);
  CHECK(r.failed() > 0);
}

TEST_CASE("json round trip") {
  auto r = run_suite(SuiteConfig::from_json({{"groups", {"constants"}}}));
  r.checks.push_back(make_check("synthetic", {{"z", "1"}, {"a", "2"}}, std::nan(""), std::nullopt, 1.0, Compare::at_most));
  r.checks.back().note = "boom";
  const auto back = report_from_json(json::parse(to_json(r).dump()));
  REQUIRE(back.total() == r.total());
  CHECK(back.version == r.version);
  CHECK(back.config == r.config);
  CHECK(back.generated_at == r.generated_at);
  for (std::size_t i = 0; i < r.total(); ++i) {
    const auto& a = r.checks[i];
    const auto& b = back.checks[i];
    CHECK(a.name == b.name);
    CHECK(a.params == b.params);
    CHECK(a.expected == b.expected);
    CHECK(a.tol == b.tol);
    CHECK(a.compare == b.compare);
    CHECK(a.pass == b.pass);
    CHECK(a.note == b.note);
    if (std::isnan(a.measured))
      CHECK(std::isnan(b.measured));
    else
      CHECK(a.measured == b.measured);
  }
  CHECK(to_json(back).dump() == to_json(r).dump());
  CHECK_THROWS(report_from_json(json::parse(R"({"version": "1"})")));
}

TEST_CASE("text report aligns columns and marks failures") {
  VerificationReport r;
  r.checks.push_back(make_check("short", {{"n", "2"}}, 1.0, 1.0, 1e-3, Compare::absolute));
  r.checks.push_back(make_check("a.much.longer.name", {{"n", "4"}, {"s", "1.5"}}, 2.0, 1.0, 1e-3, Compare::relative));
  const std::string text = format_text(r);
  std::istringstream in(text);
  std::string header, row1, row2, summary;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  std::getline(in, summary);
  CHECK(row1.rfind("ok", 0) == 0);
  CHECK(row2.rfind("FAIL", 0) == 0);
  const auto col = header.find("measured");
  CHECK(row1.substr(col, 1) == "1");
  CHECK(row2.substr(col, 1) == "2");
  CHECK(header.find("params") == row2.find("n=4"));
  CHECK(summary.find("1/2") != std::string::npos);
  CHECK(summary.find("FAIL") != std::string::npos);
  CHECK(parse_report_format("text") == ReportFormat::text);
  CHECK_THROWS(parse_report_format("xml"));
}

TEST_CASE("reports with failures are still written") {
  const auto r = run_suite(SuiteConfig::from_json({{"groups", {"constants"}}, {"tol_scale", 1e-30}}));
  CHECK(r.failed() > 0);
  const auto path = scratch() / "failed.json";
  write_report(r, ReportFormat::json, path.string());
  const auto j = json::parse(slurp(path));
  CHECK(j["summary"]["failed"].get<std::size_t>() == r.failed());
  CHECK_THROWS(write_report(r, ReportFormat::json, (scratch() / "no/such/dir/r.json").string()));
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch();
  CHECK(run_cli("constants") == 0);
  CHECK(run_cli("--tol-scale 1e-30 constants") == 1);
  CHECK(run_cli("suite --groups constants,kernel --format json --out " + (dir / "r.json").string()) == 0);
  CHECK(json::parse(slurp(dir / "r.json"))["summary"]["failed"] == 0);
  write_file(dir / "bad.json", R"({"energy": {"cases": [{"family": "gaussian", "n": 2, "s": 1.2}]}})");
  CHECK(run_cli("suite --config " + (dir / "bad.json").string()) == 2);
  write_file(dir / "broken.json", "{not json");
  CHECK(run_cli("suite --config " + (dir / "broken.json").string()) == 2);
  CHECK(run_cli("suite --config " + (dir / "absent.json").string()) == 2);
  CHECK(run_cli("suite --no-such-flag") == 2);
  CHECK(run_cli("--format yaml constants") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("energy --n 2 --s 1.2") == 2);
  CHECK(run_cli("hardy --n 2 --k 1") == 0);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli extend writes a v1 field file and dump reads it") {
  const auto dir = scratch();
  const auto f = dir / "f.csv";
  REQUIRE(run_cli("extend --family gaussian --n 4 --s 1.5 --y-count 8 --out " + f.string()) == 0);
  const std::string text = slurp(f);
  CHECK(text.rfind("# polyext-field v1 kind=spectral n=4 alpha=1.5 b=0\nrho,y,value\n", 0) == 0);
  const auto data = load_field(f.string());
  CHECK(data.n == 4);
  CHECK(data.y.size() == 9);  // ladder plus the y = 0 sentinel
  CHECK(data.y.front() == 0.0);
  CHECK(run_cli("dump --in " + f.string()) == 0);
  write_file(dir / "junk.csv", "junk\n");
  CHECK(run_cli("dump --in " + (dir / "junk.csv").string()) == 2);
  CHECK(run_cli("extend --family gaussian --n 2 --s 1.2 --out " + (dir / "g.csv").string()) == 2);
  CHECK(run_cli("extend --family gaussian --n 4 --s 1.5") == 2);
}

TEST_CASE("identical configs give identical reports apart from timing") {
  const auto dir = scratch();
  const std::string args = "suite --groups constants,energy,taylor,ibp --format json --out ";
  REQUIRE(run_cli(args + (dir / "a.json").string()) == 0);
  REQUIRE(run_cli(args + (dir / "b.json").string()) == 0);
  auto a = json::parse(slurp(dir / "a.json"));
  auto b = json::parse(slurp(dir / "b.json"));
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());
  // the parallel path reproduces the serial report
  write_file(dir / "par.json", R"({"exec": "parallel"})");
  REQUIRE(run_cli("--config " + (dir / "par.json").string() + " " + args + (dir / "c.json").string()) == 0);
  auto c = json::parse(slurp(dir / "c.json"));
  c.erase("timing");
  c.erase("config");
  a.erase("config");
  CHECK(a.dump() == c.dump());
}
