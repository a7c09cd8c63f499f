#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "config.hpp"
#include "pipelines.hpp"
#include "report.hpp"

using namespace gapcert::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gapcert_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Every numeric leaf of `results` and the constants ledger carries a source.
void check_sourced(const nlohmann::json& obj) {
  for (const auto& [k, v] : obj.items()) {
    if (v.is_object()) {
      CHECK_MESSAGE(v.contains("source"), k);
      CHECK_MESSAGE(v.contains("value"), k);
    } else {
      CHECK_MESSAGE(v.is_string(), k);
    }
  }
}

}  // namespace

TEST_CASE("SHA-256 known answer") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config parsing") {
  const auto c = Config::parse(
      "# comment\nseed = 5\n\n[certify]\nfamily = stacked   # trailing\nd = 3, 4,5\ngrid = log10:1:3:1\nJ=0.02\n");
  CHECK(c.seed() == 5u);
  CHECK(c.text("certify", "family", "") == "stacked");
  CHECK(c.integers("certify", "d", {}) == std::vector<int64_t>{3, 4, 5});
  const auto g = c.reals("certify", "grid", {});
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(10.0));
  CHECK(g[2] == doctest::Approx(1000.0));
  CHECK(c.real("certify", "J", 0) == 0.02);
  CHECK(c.real("certify", "mu", 7.5) == 7.5);

  CHECK(parse_real_list("0:1:0.25").size() == 5);
  CHECK(parse_real_list("1, 2.5").back() == 2.5);
  CHECK_THROWS_AS(parse_real_list("1:0:0.1"), UsageError);
  CHECK_THROWS_AS(parse_real_list("1, x"), UsageError);
  CHECK_THROWS_AS(parse_real_list("0:1:0"), UsageError);
}

TEST_CASE("malformed configs are usage errors") {
  CHECK_THROWS_AS(Config::parse("[certify]\nbogus = 1\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[nowhere]\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[certify\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[certify]\nJ = 1\nJ = 2\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[certify]\nJ = 0\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[edlab]\ndelta = -1e-3\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[filters]\ntrunc_tol = 0\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[certify]\nfamily = planar\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("seed = 1.5\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("seed = -1\n"), UsageError);
  CHECK_THROWS_AS(Config::parse("[edlab]\nsteps = 8, x\n"), UsageError);
  CHECK_THROWS_AS(Config::load("/nonexistent/config"), UsageError);
  CHECK_THROWS_AS(parse_constants("c_X=1"), UsageError);
  CHECK_THROWS_AS(parse_constants("c_W"), UsageError);
  CHECK_THROWS_AS(parse_constants("c_W=-2"), UsageError);
  const auto ok = parse_constants("c_W=2, c_D=0.5");
  REQUIRE(ok.size() == 2);
  CHECK(ok[1].first == "c_D");
}

TEST_CASE("config hash ignores layout but not content") {
  const auto a = Config::parse("[certify]\nJ = 0.01\nmu = 5\n");
  const auto b = Config::parse("# same\n[certify]\nmu=5\n\n  J =0.01  \n");
  const auto c = Config::parse("[certify]\nJ = 0.02\nmu = 5\n");
  CHECK(a.sha256() == b.sha256());
  CHECK(a.sha256() != c.sha256());
  CHECK(a.canonical() == "[certify]\nJ = 0.01\nmu = 5\n");
}

TEST_CASE("seed is mandatory for randomized checks") {
  Config c = Config::parse("[edlab]\ntask = relbound\ntoric = 2, 2\n");
  CHECK_THROWS_AS(c.require_seed("x"), UsageError);
  CHECK_THROWS_AS(run_edlab(c, scratch("noseed").string(), std::cerr), UsageError);
  c.set("", "seed", "3");
  CHECK(c.require_seed("x") == 3u);
}

TEST_CASE("certify pipeline: semi-hyperbolic certifies, reports are reproducible") {
  const auto cfg = Config::parse("task = certify\n[certify]\nfamily = semi-hyperbolic\na = 0.25\n");
  const auto d1 = scratch("cert1"), d2 = scratch("cert2");
  std::ostringstream log;
  CHECK(run_task("certify", cfg, d1.string(), log) == kSuccess);
  CHECK(run_task("certify", cfg, d2.string(), log) == kSuccess);
  for (const char* f : {"report.json", "summary.csv", "points.csv", "intervals.csv"}) {
    REQUIRE(fs::exists(d1 / f));
    CHECK_MESSAGE(slurp(d1 / f) == slurp(d2 / f), f);
  }
  const auto rep = nlohmann::json::parse(slurp(d1 / "report.json"));
  CHECK(rep["schema_version"] == kSchemaVersion);
  CHECK(rep["config_sha256"] == cfg.sha256());
  CHECK(rep["results"]["verdict"] == "certified-trend");
  CHECK(rep["constants"]["c_W"]["source"] == "default");
  check_sourced(rep["results"]);
  check_sourced(rep["constants"]);
  for (const auto& t : rep["tables"])
    for (const auto& col : t["columns"]) CHECK_FALSE(col["source"].get<std::string>().empty());

  // Constants overrides change the hash and the ledger.
  Config c2 = cfg;
  c2.set("constants", "c_W", "2");
  CHECK(c2.sha256() != cfg.sha256());
  const auto d3 = scratch("cert3");
  run_task("certify", c2, d3.string(), log);
  const auto rep2 = nlohmann::json::parse(slurp(d3 / "report.json"));
  CHECK(rep2["constants"]["c_W"]["value"] == 2.0);
  CHECK(rep2["constants"]["c_W"]["source"] == "config");

  CHECK_THROWS_AS(run_task("edlab", cfg, d3.string(), log), UsageError);
}

TEST_CASE("certify pipeline: the hyperbolic limit does not certify") {
  const auto cfg = Config::parse("[certify]\nfamily = hyperbolic\n");
  std::ostringstream log;
  const int code = run_certify(cfg, scratch("hyp").string(), log);
  CHECK((code == kFails || code == kInconclusive));
}

TEST_CASE("families pipeline") {
  const auto cfg = Config::parse("[families]\nkind = toric\nl1 = 2\nl2 = 3\ndistance_cap = 4\n");
  const auto d = scratch("fam");
  std::ostringstream log;
  CHECK(run_families(cfg, d.string(), log) == kSuccess);
  const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
  CHECK(rep["results"]["N"]["value"] == 12.0);
  CHECK(rep["results"]["k"]["value"] == 2.0);
  CHECK(rep["results"]["d"]["value"] == 2.0);
  check_sourced(rep["results"]);
  CHECK(line_count(d / "growth.csv") >= 3);
}

TEST_CASE("edlab pipeline: toric(2,2) transport gives a residual table") {
  const auto cfg = Config::parse("[edlab]\ntask = transport\ntoric = 2, 2\nsteps = 4, 8\n");
  const auto d = scratch("transport");
  std::ostringstream log;
  CHECK(run_edlab(cfg, d.string(), log) == kSuccess);
  CHECK(line_count(d / "residuals.csv") == 3);
  const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
  CHECK(rep["status"] == "pass");
  CHECK(rep["results"]["convergence_slope"]["value"].get<double>() == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("edlab pipeline: spectrum trace CSV and input errors") {
  const auto cfg = Config::parse("[edlab]\ntask = spectrum\ntoric = 2, 2\nfield_x = 0.02\nlevels = 6\ns_grid = 0, 1\n");
  const auto d = scratch("trace");
  std::ostringstream log;
  CHECK(run_edlab(cfg, d.string(), log) == kSuccess);
  const std::string csv = slurp(d / "trace.csv");
  CHECK(csv.rfind("s,E0,E1,E2,E3,E4,E5\n", 0) == 0);
  CHECK(line_count(d / "trace.csv") == 3);

  CHECK_THROWS_AS(run_edlab(Config::parse("[edlab]\ntask = spectrum\n"), d.string(), log), UsageError);
  CHECK_THROWS_AS(run_edlab(Config::parse("[edlab]\ncode = /nonexistent.code\n"), d.string(), log),
                  std::runtime_error);
}

TEST_CASE("report merge") {
  std::ostringstream log;
  const auto a = scratch("ma"), b = scratch("mb"), out = scratch("mout");
  run_families(Config::parse("[families]\nkind = toric\nl1 = 2\nl2 = 2\n"), a.string(), log);
  run_families(Config::parse("[families]\nkind = toric\nl1 = 3\nl2 = 3\n"), b.string(), log);
  const auto r = report_merge({a.string(), b.string()}, out.string());
  CHECK(r.runs == 2);
  CHECK(line_count(out / "summary.csv") - 1 == (line_count(a / "summary.csv") - 1) + (line_count(b / "summary.csv") - 1));
  CHECK(line_count(out / "growth.csv") - 1 == (line_count(a / "growth.csv") - 1) + (line_count(b / "growth.csv") - 1));
  CHECK(fs::exists(out / "summary.md"));

  CHECK_THROWS_AS(report_merge({}, out.string()), std::runtime_error);
  CHECK_THROWS_AS(report_merge({scratch("missing").string()}, out.string()), std::runtime_error);

  auto j = nlohmann::json::parse(slurp(b / "report.json"));
  j["schema_version"] = "gapcert-report/999";
  std::ofstream(b / "report.json") << j.dump();
  CHECK_THROWS_WITH_AS(report_merge({a.string(), b.string()}, out.string()),
                       doctest::Contains("conflicts"), std::runtime_error);
}
