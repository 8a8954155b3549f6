#include "doctest.h"
#include "reachlab/config.hpp"

using namespace reachlab;

namespace {

const char* kMinimal = R"(
omega = { kind = "box", lower = [-1.0], upper = [1.0] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
)";

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text, "test.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal document gets the documented defaults") {
    const auto cfg = parse_config(kMinimal, "minimal");
    const ReachSpec defaults;
    const ExperimentBlock experiment;
    CHECK(cfg.spec == defaults);
    CHECK(cfg.t == 1.0);
    CHECK(cfg.x0 == Vector{0.0});
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.name == "minimal");
    CHECK(cfg.experiment.deltas == experiment.deltas);
    CHECK(cfg.experiment.functional == "x0");
    CHECK(cfg.omega.has_value());
    CHECK(cfg.system->state_dim() == 1);
    const std::string help = config_schema_help();
    for (const char* needle : {"N = 4", "k = 2", "h = 0.01", "r = 0.005", "budget = 2000000", "deltas = [0.4, 0.2, 0.1, 0.05]"}) {
      CHECK_MESSAGE(help.find(needle) != std::string::npos, needle);
    }
  }

  TEST_CASE("full document") {
    const auto cfg = parse_config(R"(
name = "full"   # trailing comment
t = 2.5
x0 = [1, -2]
out = "results"

[system]
n = 2
m = 2
drift = ["x1", "-x0"]
f1 = ["1", "0"]
f2 = ["0", "x0^2"]

[omega]
kind = "ball"
center = [0, 0]
radius = 0.5

[spec]
N = 3
k = 5
h = 0.005
r = 0
mode = "random"
seed = 18446744073709551615
samples = 1_000
budget = 5000

[experiment]
deltas = [
  0.3,
  0.1,   # multi-line arrays
]
probes = 8
functional = "x0^2 + x1^2"
dictionary_depth = 3
levels = 2
square_waves = [2, 4]
amplitude = 0.5
dump_clouds = true
omega_b = { kind = "hull", vertices = [[0, 0], [1, 0], [0, 1]] }
)");
    CHECK(cfg.name == "full");
    CHECK(cfg.t == 2.5);
    CHECK(cfg.x0 == Vector{1, -2});
    CHECK(cfg.output_dir == "results");
    CHECK(cfg.spec.switches == 3);
    CHECK(cfg.spec.value_resolution == 5);
    CHECK(cfg.spec.resolution == 0.0);
    CHECK(cfg.spec.mode == SamplingMode::Random);
    CHECK(cfg.spec.seed == 18446744073709551615ULL);
    CHECK(cfg.spec.samples == 1000);
    CHECK(cfg.experiment.deltas == std::vector<double>{0.3, 0.1});
    CHECK(cfg.experiment.square_waves == std::vector<int>{2, 4});
    CHECK(cfg.experiment.dump_clouds);
    CHECK(cfg.experiment.omega_b.has_value());
    CHECK(*cfg.omega == OmegaSet::ball({0, 0}, 0.5));
  }

  TEST_CASE("duplicate key names the key") {
    std::string text = kMinimal;
    text += "n = 2\n";
    const auto msg = error_of(text);
    CHECK(msg.find("system.n") != std::string::npos);
    CHECK(msg.find("duplicate") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "[system]\n").find("duplicate") != std::string::npos);
  }

  TEST_CASE("missing omega") {
    const auto msg = error_of("[system]\nn = 1\nm = 1\ndrift = [\"0\"]\nf1 = [\"1\"]\n");
    CHECK(msg.find("omega block required") != std::string::npos);
  }

  TEST_CASE("missing controlled field names it") {
    const auto msg = error_of(R"(
omega = { kind = "box", lower = [-1, -1], upper = [1, 1] }
[system]
n = 1
m = 2
drift = ["0"]
f1 = ["1"]
)");
    CHECK(msg.find("system.f2") != std::string::npos);
  }

  TEST_CASE("diagnostics carry line numbers and field names") {
    try {
      (void)parse_config(std::string(kMinimal) + "[spec]\nN = 0\n");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 9);
      CHECK(e.field() == "spec.N");
    }
    const auto typo = error_of(std::string(kMinimal) + "[spec]\nstep = 0.1\n");
    CHECK(typo.find("unknown key 'spec.step'") != std::string::npos);
    CHECK(error_of("colour = 1\n" + std::string(kMinimal)).find("unknown key 'colour'") != std::string::npos);
    CHECK(error_of("t = \"one\"\n" + std::string(kMinimal)).find("expected a number") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "t = 1 2\n").find("line 8") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "name = \"open\n").find("unterminated") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "colour = 1\n").find("unknown key 'system.colour'") != std::string::npos);
  }

  TEST_CASE("cross-dimension checks") {
    CHECK(error_of("x0 = [0, 0]\n" + std::string(kMinimal)).find("x0': has 2 components but n = 1") != std::string::npos);
    CHECK(error_of(R"(
omega = { kind = "box", lower = [-1, -1], upper = [1, 1] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
)").find("system.m") != std::string::npos);
    CHECK(error_of(R"(
omega = { kind = "box", lower = [-1], upper = [1] }
[system]
n = 1
m = 1
drift = ["x1"]
f1 = ["1"]
)").find("system.drift") != std::string::npos);
    CHECK(error_of(R"(
omega = { kind = "box", lower = [-1], upper = [1] }
[system]
n = 2
m = 1
drift = ["0"]
f1 = ["1", "0"]
)").find("system.drift") != std::string::npos);
    CHECK(error_of(R"(
omega = { kind = "cube", lower = [-1], upper = [1] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
)").find("omega.kind") != std::string::npos);
    CHECK(error_of(R"(
omega = { kind = "box", lower = [1], upper = [-1] }
[system]
n = 1
m = 1
drift = ["0"]
f1 = ["1"]
)").find("omega") != std::string::npos);
  }

  TEST_CASE("built-in demos all parse") {
    const auto& demos = builtin_demos();
    CHECK(demos.size() == 5);
    for (const auto& [name, text] : demos) {
      const auto cfg = parse_config(text, name);
      CHECK(cfg.name == name);
    }
    CHECK(load_config("demo_linear").system_source.m == 2);
    CHECK_THROWS_AS(load_config("no_such_demo"), ConfigError);
  }
}
