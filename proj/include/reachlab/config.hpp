#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reachlab/reach.hpp"

namespace reachlab {

/// Invalid configuration document. `line` is 0 when the problem is not tied
/// to one line (e.g. a missing block).
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& field, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

struct SystemSource {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::string> drift;
  std::vector<std::vector<std::string>> controlled;
};

struct ExperimentBlock {
  std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
  int probes = 4;
  std::string functional = "x0";
  int dictionary_depth = 4;
  int levels = 3;
  std::vector<int> square_waves{4, 8, 16, 32};
  double amplitude = 1.0;
  bool dump_clouds = false;
  std::optional<OmegaSet> omega_b;  ///< second range for the `hausdorff` subcommand
};

struct ExperimentConfig {
  std::string name;
  SystemSource system_source;
  std::optional<ControlAffineSystem> system;
  std::optional<OmegaSet> omega;
  Vector x0;
  double t = 1.0;
  ReachSpec spec;
  ExperimentBlock experiment;
  std::string output_dir = "out";
};

/// Parses a config document (a TOML subset: `[section]` headers,
/// `key = value` with numbers, strings, booleans, arrays and inline tables,
/// `#` comments). Unknown and duplicate keys are errors. All dimensions are
/// cross-checked and every expression is parsed before returning.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");

/// Reads `path`; when no such file exists and `path` names a built-in demo
/// (e.g. "demo_integrator"), loads that demo instead.
ExperimentConfig load_config(const std::string& path);

/// Built-in demo documents keyed by name.
const std::map<std::string, std::string>& builtin_demos();

/// Human-readable schema with every default, shown by `--help`.
std::string config_schema_help();

}  // namespace reachlab
