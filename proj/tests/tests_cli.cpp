#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tdho/snapshot.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("TDHO_CLI");
  REQUIRE_MESSAGE(p != nullptr, "TDHO_CLI must point at the tool binary");
  return p;
}

fs::path work_root() {
  const char* p = std::getenv("TDHO_TEST_TMP");
  fs::path root = p ? fs::path(p) : fs::temp_directory_path();
  root /= "cli_work";
  return root;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = work_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << body;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing " << path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Row {
  std::string run, sub, params, metric, value, tolerance, status;
};

std::vector<Row> read_report(const fs::path& dir) {
  std::istringstream in(slurp(dir / "report.csv"));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "run,subcommand,params,metric,value,tolerance,status");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (line.back() == ',') f.push_back("");
    REQUIRE(f.size() == 7);
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
  }
  return rows;
}

const Row* find_row(const std::vector<Row>& rows, const std::string& metric) {
  for (const auto& r : rows)
    if (r.metric == metric) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("fundamental run: passing rows and byte-identical reruns") {
  const fs::path d1 = fresh_dir("fund1");
  const fs::path d2 = fresh_dir("fund2");
  CHECK(run_cli("fundamental --out " + d1.string()) == 0);
  CHECK(run_cli("fundamental --out " + d2.string()) == 0);

  const auto rows = read_report(d1);
  const Row* c3 = find_row(rows, "c3");
  REQUIRE(c3 != nullptr);
  CHECK(c3->value == "1.5");
  CHECK(c3->status == "pass");
  CHECK(c3->tolerance.empty());

  const Row* c3err = find_row(rows, "c3_error");
  REQUIRE(c3err != nullptr);
  CHECK(c3err->status == "pass");
  CHECK(c3err->tolerance == "1e-10");

  const Row* wdev = find_row(rows, "wronskian_deviation");
  REQUIRE(wdev != nullptr);
  CHECK(wdev->status == "pass");
  CHECK(wdev->tolerance == "1e-08");
  REQUIRE(find_row(rows, "wronskian") != nullptr);
  CHECK(std::stod(find_row(rows, "wronskian")->value) == doctest::Approx(1.0).epsilon(1e-7));

  for (const auto& r : rows) CHECK(r.sub == "fundamental");

  CHECK(slurp(d1 / "report.csv") == slurp(d2 / "report.csv"));
  CHECK(slurp(d1 / "fundamental_series.csv") == slurp(d2 / "fundamental_series.csv"));

  // the series has the sweep plus the origin sample
  std::istringstream series(slurp(d1 / "fundamental_series.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(series, line)) ++lines;
  CHECK(lines == 1 + 123);
}

TEST_CASE("operational failures exit with code 1") {
  const fs::path dir = fresh_dir("bad");

  const fs::path broken = dir / "broken.json";
  write_file(broken, "{ this is not json");
  CHECK(run_cli("fundamental --config " + broken.string() + " --out " + dir.string()) == 1);

  const fs::path unknown = dir / "unknown.json";
  write_file(unknown, R"({"model": {"mass": 1.0}})");
  CHECK(run_cli("fundamental --config " + unknown.string() + " --out " + dir.string()) == 1);

  const fs::path invalid = dir / "invalid.json";
  write_file(invalid, R"({"model": {"k": 0.5}})");
  CHECK(run_cli("fundamental --config " + invalid.string() + " --out " + dir.string()) == 1);

  // a block outside the subcommand's schema is rejected, not ignored
  const fs::path stray = dir / "stray.json";
  write_file(stray, R"({"schedule": {"dt_max": 0.25}})");
  CHECK(run_cli("fundamental --config " + stray.string() + " --out " + dir.string()) == 1);

  CHECK(run_cli("fundamental --config " + (dir / "absent.json").string() +
                " --out " + dir.string()) == 1);

  // no subcommand at all
  CHECK(run_cli("") == 1);
}

TEST_CASE("factorization residual vanishes at the matching corner") {
  const fs::path dir = fresh_dir("fact_corner");
  const fs::path cfg = dir / "run.json";
  write_file(cfg, R"({
    "grid": {"n": 512, "half_width": 32.0},
    "potential": {"shape": "none"},
    "state": {"momentum": [1.0], "width": 2.0},
    "schedule": {"times": [1.0], "tolerance": 1e-6}
  })");
  CHECK(run_cli("factorization --config " + cfg.string() + " --out " + dir.string()) == 0);

  const auto rows = read_report(dir);
  const Row* r = find_row(rows, "residual_t=1");
  REQUIRE(r != nullptr);
  CHECK(r->status == "pass");
  CHECK(std::stod(r->value) <= 1e-6);
}

TEST_CASE("coarse stepping produces fail rows and exit code 2") {
  const fs::path dir = fresh_dir("fact_coarse");
  const fs::path cfg = dir / "run.json";
  write_file(cfg, R"({
    "grid": {"n": 512, "half_width": 32.0},
    "potential": {"shape": "bump", "g": 1.0, "rho": 2.0},
    "state": {"momentum": [1.0], "width": 2.0},
    "schedule": {"times": [2.0], "dt_max": 0.5, "error_target": 1e6,
                 "max_halvings": 0, "tolerance": 1e-6}
  })");
  CHECK(run_cli("factorization --config " + cfg.string() + " --out " + dir.string()) == 2);

  const auto rows = read_report(dir);
  const Row* r = find_row(rows, "residual_t=2");
  REQUIRE(r != nullptr);
  CHECK(r->status == "fail");
  CHECK(std::stod(r->value) > 1e-6);
}

TEST_CASE("snapshots are opt-in and loadable") {
  const fs::path dir = fresh_dir("snap");
  const fs::path cfg = dir / "run.json";
  write_file(cfg, R"({
    "grid": {"n": 256, "half_width": 24.0},
    "potential": {"shape": "none"},
    "state": {"momentum": [1.0], "width": 2.0},
    "schedule": {"times": [1.0]}
  })");

  CHECK(run_cli("factorization --config " + cfg.string() + " --out " + dir.string()) == 0);
  CHECK(!fs::exists(dir / "factorization_final.snap"));

  CHECK(run_cli("factorization --config " + cfg.string() + " --out " + dir.string() +
                " --snapshot") == 0);
  REQUIRE(fs::exists(dir / "factorization_final.snap"));

  const tdho::WaveFunction psi =
      tdho::read_snapshot((dir / "factorization_final.snap").string());
  CHECK(psi.grid.n == 256);
  CHECK(psi.grid.dim == 1);
  CHECK(tdho::norm(psi) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(psi.time_tag == doctest::Approx(1.0));
}
