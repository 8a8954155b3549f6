#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "reachlab/cli.hpp"
#include "reachlab/io.hpp"

using namespace reachlab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("reachlab_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / (name + ".toml");
  write_text_file(path.string(), text);
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("reach writes the cloud and summary") {
    const auto dir = scratch("reach");
    const auto r = invoke({"reach", "--config", "demo_integrator", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(fs::exists(dir / "cloud.csv"));
    const auto summary = nlohmann::json::parse(read_text_file((dir / "summary.json").string()));
    CHECK(summary["meta"].contains("generated_at"));
    CHECK(summary["points"].get<std::size_t>() > 0);
    CHECK(summary["slack"].contains("total"));
    const auto cloud = cloud_from_csv(read_text_file((dir / "cloud.csv").string()));
    CHECK(cloud.dim() == 1);
  }

  TEST_CASE("config errors exit 2 and name the field") {
    const auto path = write_config("reachlab_bad_m", R"(
omega = { kind = "box", lower = [-1, -1], upper = [1, 1] }
[system]
n = 1
m = 2
drift = ["0"]
f1 = ["1"]
)");
    const auto dir = scratch("bad");
    const auto r = invoke({"reach", "--config", path.string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("system.f2") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"teleport", "--config", "demo_integrator"}).code == 2);
    CHECK(invoke({"reach"}).code == 2);
    CHECK(invoke({"reach", "--config", "demo_integrator", "--t", "-1"}).code == 2);
    CHECK(invoke({"reach", "--config", "missing_file.toml"}).code == 2);
  }

  TEST_CASE("help documents the defaults") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("budget = 2000000") != std::string::npos);
    CHECK(r.out.find("sweep-omega") != std::string::npos);
  }

  TEST_CASE("runtime errors exit 3 without partial output") {
    const auto path = write_config("reachlab_blowup", R"(
t = 2.0
x0 = [1.0]
omega = { kind = "box", lower = [0.0], upper = [0.0] }
[system]
n = 1
m = 1
drift = ["x0^2"]
f1 = ["1"]
[spec]
N = 1
k = 1
h = 0.001
)");
    const auto dir = scratch("blowup");
    const auto r = invoke({"reach", "--config", path.string(), "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("blew up") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "cloud.csv"));
    CHECK_FALSE(fs::exists(dir / "summary.json"));

    const auto budget = write_config("reachlab_budget", R"(
omega = { kind = "box", lower = [-1.0], upper = [1.0] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
[spec]
N = 20
k = 4
)");
    CHECK(invoke({"reach", "--config", budget.string(), "--out", dir.string()}).code == 3);
  }

  TEST_CASE("sweep-omega rows match the analytic table") {
    const auto dir = scratch("sweep");
    const auto r = invoke({"sweep-omega", "--config", "demo_integrator", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto report = rows_from_csv(read_text_file((dir / "rows.csv").string()), SweepKind::Omega);
    CHECK(report.rows.size() == 4);
    for (const auto& row : report.rows) CHECK(std::fabs(row.rho_h - row.delta) <= 0.02);
    const auto verdict = nlohmann::json::parse(read_text_file((dir / "verdict.json").string()));
    CHECK(verdict["passed"].get<bool>());
  }

  TEST_CASE("overrides: --delta, --t, --seed") {
    const auto dir = scratch("override");
    const auto r = invoke({"sweep-state", "--config", "demo_integrator", "--out", dir.string(), "--delta", "0.3",
                           "--delta", "0.1", "--t", "0.5", "--seed", "9"});
    REQUIRE(r.code == 0);
    const auto report = rows_from_csv(read_text_file((dir / "rows.csv").string()), SweepKind::State);
    CHECK(report.rows.size() == 2);
    const auto summary = nlohmann::json::parse(read_text_file((dir / "summary.json").string()));
    CHECK(summary["config"]["t"].get<double>() == 0.5);
    CHECK(summary["config"]["spec"]["seed"].get<std::uint64_t>() == 9);
  }

  TEST_CASE("hausdorff between two cloud files") {
    const auto dir = scratch("hd");
    fs::create_directories(dir);
    write_text_file((dir / "a.csv").string(), "x0\n0\n1\n");
    write_text_file((dir / "b.csv").string(), "x0\n0\n3\n");
    const auto r = invoke({"hausdorff", "--a", (dir / "a.csv").string(), "--b", (dir / "b.csv").string(), "--out",
                           (dir / "o").string()});
    REQUIRE(r.code == 0);
    const auto summary = nlohmann::json::parse(read_text_file((dir / "o" / "summary.json").string()));
    CHECK(summary["result"]["rho_h"].get<double>() == 2.0);
    CHECK(summary["result"]["dir_ab"].get<double>() == 1.0);
  }

  TEST_CASE("every subcommand runs on a demo") {
    const auto cfg = write_config("reachlab_small", R"(
t = 0.5
omega = { kind = "box", lower = [-1.0], upper = [1.0] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
[spec]
N = 2
k = 2
h = 0.01
r = 0.01
[experiment]
deltas = [0.2, 0.1]
levels = 2
square_waves = [2, 4]
dump_clouds = true
omega_b = { kind = "box", lower = [-0.5], upper = [0.5] }
)");
    for (const char* cmd : {"reach", "hausdorff", "sweep-omega", "sweep-time", "sweep-state", "sweep-joint", "optimize",
                            "converge", "weakstar"}) {
      const auto dir = scratch(std::string("all_") + cmd);
      const auto r = invoke({cmd, "--config", cfg.string(), "--out", dir.string(), "--jobs", "1"});
      CHECK_MESSAGE(r.code == 0, cmd << ": " << r.err);
      CHECK(fs::exists(dir / "summary.json"));
    }
    CHECK(fs::exists(fs::temp_directory_path() / "reachlab_cli_test_all_sweep-omega" / "cloud_row0.csv"));
  }

  TEST_CASE("identical invocations give byte-identical data files") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b}) {
      REQUIRE(invoke({"sweep-joint", "--config", "demo_integrator", "--out", dir.string(), "--seed", "5"}).code == 0);
    }
    for (const char* f : {"rows.csv", "cloud.csv", "verdict.json"}) {
      CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
    }
  }

  TEST_CASE("REACHLAB_JOBS must be a positive integer") {
    setenv("REACHLAB_JOBS", "zero", 1);
    CHECK(invoke({"reach", "--config", "demo_integrator", "--out", scratch("jobs").string()}).code == 2);
    setenv("REACHLAB_JOBS", "1", 1);
    CHECK(invoke({"reach", "--config", "demo_integrator", "--out", scratch("jobs").string()}).code == 0);
    unsetenv("REACHLAB_JOBS");
  }
}
