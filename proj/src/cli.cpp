#include "reachlab/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"
#include "reachlab/config.hpp"
#include "reachlab/io.hpp"

namespace reachlab {

namespace {

using json = nlohmann::json;

struct Subcommand {
  const char* name;
  const char* description;
};

constexpr Subcommand kSubcommands[] = {
    {"reach", "approximate the reachable set at t as a point cloud"},
    {"hausdorff", "distance between two clouds (--a/--b) or two ranges (experiment.omega_b)"},
    {"sweep-omega", "perturb the control range by each delta"},
    {"sweep-time", "perturb the horizon by each delta"},
    {"sweep-state", "perturb x0 by each delta along a direction net"},
    {"sweep-joint", "perturb x0, range and horizon together"},
    {"optimize", "min and max of experiment.functional over the cloud"},
    {"converge", "Hausdorff gaps between refinement levels"},
    {"weakstar", "square-wave controls versus the zero control"}};

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::string cloud_a, cloud_b;
  std::optional<std::uint64_t> seed;
  std::optional<double> t;
  std::vector<double> deltas;
  int jobs = 0;
};

/// Files produced by one command; written together after all work is done.
using Artifacts = std::map<std::string, std::string>;

json omega_json(const OmegaSet& omega) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box>) {
          return {{"kind", "box"}, {"lower", s.lower}, {"upper", s.upper}};
        } else if constexpr (std::is_same_v<S, Ball>) {
          return {{"kind", "ball"}, {"center", s.center}, {"radius", s.radius}};
        } else {
          return {{"kind", "hull"}, {"vertices", s.vertices}};
        }
      },
      omega.shape());
}

json spec_json(const ReachSpec& s) {
  return {{"N", s.switches},
          {"k", s.value_resolution},
          {"h", s.step},
          {"r", s.resolution},
          {"mode", s.mode == SamplingMode::Exhaustive ? "exhaustive" : "random"},
          {"seed", s.seed},
          {"samples", s.samples},
          {"budget", s.budget},
          {"piece_duration", s.piece_duration}};
}

json config_json(const ExperimentConfig& cfg) {
  json controlled = json::array();
  for (const auto& f : cfg.system_source.controlled) controlled.push_back(f);
  return {{"name", cfg.name},
          {"system",
           {{"n", cfg.system_source.n},
            {"m", cfg.system_source.m},
            {"drift", cfg.system_source.drift},
            {"controlled", controlled}}},
          {"omega", omega_json(*cfg.omega)},
          {"x0", cfg.x0},
          {"t", cfg.t},
          {"spec", spec_json(cfg.spec)}};
}

json slack_json(const SlackBudget& s) {
  return {{"dedup", s.dedup}, {"integration", s.integration}, {"net", s.net}, {"total", s.total()}};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json report_verdict(const SweepReport& report) {
  return {{"kind", sweep_kind_name(report.kind)},
          {"passed", report.passed()},
          {"verdicts", report.verdicts},
          {"metrics", report.metrics}};
}

class Runner {
 public:
  Runner(const Options& opt, ExperimentConfig cfg) : opt_(opt), cfg_(std::move(cfg)) {
    summary_["meta"] = {{"generated_at", timestamp()}, {"command", opt.command}};
    summary_["config"] = config_json(cfg_);
  }

  Artifacts execute() {
    const std::string& c = opt_.command;
    if (c == "reach") {
      reach();
    } else if (c == "hausdorff") {
      hausdorff_cmd();
    } else if (c == "optimize") {
      optimize();
    } else if (c == "converge") {
      converge();
    } else if (c == "weakstar") {
      weakstar();
    } else {
      sweep();
    }
    files_["summary.json"] = dump(summary_);
    return files_;
  }

 private:
  const ControlAffineSystem& sys() const { return *cfg_.system; }
  const OmegaSet& omega() const { return *cfg_.omega; }

  PointCloud base_cloud() { return reachable_cloud(sys(), cfg_.x0, cfg_.t, omega(), cfg_.spec); }

  void reach() {
    const PointCloud cloud = base_cloud();
    files_["cloud.csv"] = cloud_to_csv(cloud);
    summary_["points"] = cloud.size();
    summary_["slack"] = slack_json(estimate_slack(sys(), cfg_.x0, cfg_.t, omega(), cfg_.spec, cloud));
  }

  void hausdorff_cmd() {
    PointCloud a = base_cloud();
    PointCloud b = a;
    json result;
    if (!cfg_.experiment.omega_b) {
      throw ConfigError(0, "experiment.omega_b", "required by 'hausdorff' unless --a and --b are given");
    }
    const OmegaSet& omega_b = *cfg_.experiment.omega_b;
    b = reachable_cloud(sys(), cfg_.x0, cfg_.t, omega_b, cfg_.spec);
    result["d_omega"] = omega_hausdorff(omega(), omega_b);
    result["omega_b"] = omega_json(omega_b);
    result["rho_h"] = hausdorff(a, b);
    result["dir_ab"] = directed_hausdorff(a, b);
    result["dir_ba"] = directed_hausdorff(b, a);
    result["points_a"] = a.size();
    result["points_b"] = b.size();
    summary_["result"] = result;
    files_["cloud.csv"] = cloud_to_csv(a);
    files_["cloud_b.csv"] = cloud_to_csv(b);
  }

  void optimize() {
    const PointCloud cloud = base_cloud();
    const Expr functional = Expr::parse(cfg_.experiment.functional, state_variable_names(cfg_.system_source.n));
    const Extremum e = extremize_functional(functional, cloud);
    summary_["functional"] = cfg_.experiment.functional;
    summary_["result"] = {{"min", e.min_value}, {"argmin", e.argmin}, {"max", e.max_value}, {"argmax", e.argmax}};
    summary_["points"] = cloud.size();
    summary_["slack"] = slack_json(estimate_slack(sys(), cfg_.x0, cfg_.t, omega(), cfg_.spec, cloud));
    files_["cloud.csv"] = cloud_to_csv(cloud);
  }

  void converge() {
    const auto study = convergence_study(sys(), cfg_.x0, cfg_.t, omega(), cfg_.spec, cfg_.experiment.levels);
    std::string csv = "level,N,k,h,r,points,gap\n";
    json levels = json::array();
    for (const auto& l : study.levels) {
      csv += std::to_string(l.level) + "," + std::to_string(l.spec.switches) + "," +
             std::to_string(l.spec.value_resolution) + "," + format_double(l.spec.step) + "," +
             format_double(l.spec.resolution) + "," + std::to_string(l.points) + "," + format_double(l.gap) + "\n";
      levels.push_back({{"level", l.level}, {"spec", spec_json(l.spec)}, {"points", l.points}, {"gap", l.gap}});
    }
    const double final_gap = study.levels.back().gap;
    json verdicts = {{"final_gap_within_2r", final_gap <= 2.0 * study.final_resolution}};
    if (study.strictly_decreasing) verdicts["strictly_decreasing"] = *study.strictly_decreasing;
    bool passed = true;
    for (const auto& [k, v] : verdicts.items()) passed = passed && v.get<bool>();
    summary_["levels"] = levels;
    files_["rows.csv"] = csv;
    files_["verdict.json"] = dump({{"kind", "converge"},
                                   {"passed", passed},
                                   {"verdicts", verdicts},
                                   {"metrics", {{"final_gap", final_gap}, {"final_resolution", study.final_resolution}}}});
  }

  void weakstar() {
    const auto& e = cfg_.experiment;
    const auto study = chattering_study(sys(), cfg_.x0, cfg_.t, omega(), e.square_waves, e.amplitude,
                                        e.dictionary_depth, cfg_.spec.step);
    std::string csv = "pieces,discrepancy,endpoint_distance\n";
    for (const auto& r : study.rows) {
      csv += std::to_string(r.pieces) + "," + format_double(r.discrepancy) + "," +
             format_double(r.endpoint_distance) + "\n";
    }
    files_["rows.csv"] = csv;
    const bool passed = study.discrepancy_nonincreasing && study.endpoint_shrinks;
    files_["verdict.json"] = dump({{"kind", "weakstar"},
                                   {"passed", passed},
                                   {"verdicts",
                                    {{"discrepancy_nonincreasing", study.discrepancy_nonincreasing},
                                     {"endpoint_shrinks", study.endpoint_shrinks}}},
                                   {"metrics", {{"min_shrink_ratio", study.min_shrink_ratio}}}});
  }

  void sweep() {
    const auto& c = opt_.command;
    const auto& e = cfg_.experiment;
    SweepReport report;
    if (c == "sweep-omega") {
      report = sweep_omega(sys(), cfg_.x0, cfg_.t, omega(), e.deltas, cfg_.spec);
    } else if (c == "sweep-time") {
      report = sweep_time(sys(), cfg_.x0, cfg_.t, e.deltas, omega(), cfg_.spec);
    } else if (c == "sweep-state") {
      report = sweep_state(sys(), cfg_.t, omega(), cfg_.x0, e.deltas, cfg_.spec, e.probes);
    } else {
      report = joint_sweep(sys(), cfg_.x0, cfg_.t, omega(), e.deltas, cfg_.spec, cfg_.spec.seed);
    }
    files_["rows.csv"] = rows_to_csv(report);
    files_["verdict.json"] = dump(report_verdict(report));
    summary_["rows"] = report.rows.size();
    summary_["passed"] = report.passed();
    const PointCloud base = base_cloud();
    files_["cloud.csv"] = cloud_to_csv(base);
    if (e.dump_clouds) dump_rows(report);
  }

  // Per-row perturbed clouds for plotting (joint rows are not reproduced).
  void dump_rows(const SweepReport& report) {
    const auto& c = opt_.command;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const double delta = report.rows[i].delta;
      std::optional<PointCloud> cloud;
      if (c == "sweep-omega") {
        cloud = reachable_cloud(sys(), cfg_.x0, cfg_.t, omega_outward(omega(), delta), cfg_.spec);
      } else if (c == "sweep-time") {
        ReachSpec spec = cfg_.spec;
        spec.piece_duration = cfg_.t / spec.switches;
        cloud = reachable_cloud(sys(), cfg_.x0, cfg_.t + delta, omega(), spec);
      } else if (c == "sweep-state") {
        Vector y = cfg_.x0;
        const auto dirs = direction_net(y.size(), static_cast<std::size_t>(cfg_.experiment.probes));
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += delta * dirs[0][j];
        cloud = reachable_cloud(sys(), y, cfg_.t, omega(), cfg_.spec);
      }
      if (cloud) files_["cloud_row" + std::to_string(i) + ".csv"] = cloud_to_csv(*cloud);
    }
  }

  const Options& opt_;
  ExperimentConfig cfg_;
  json summary_;
  Artifacts files_;
};

// Distance between two cloud CSVs; no system config needed.
Artifacts hausdorff_files(const Options& opt) {
  const PointCloud a = cloud_from_csv(read_text_file(opt.cloud_a));
  const PointCloud b = cloud_from_csv(read_text_file(opt.cloud_b));
  if (a.dim() != b.dim()) throw DimensionError("hausdorff: clouds have different dimensions");
  json summary;
  summary["meta"] = {{"generated_at", timestamp()}, {"command", "hausdorff"}};
  summary["result"] = {{"rho_h", hausdorff(a, b)},
                       {"dir_ab", directed_hausdorff(a, b)},
                       {"dir_ba", directed_hausdorff(b, a)},
                       {"points_a", a.size()},
                       {"points_b", b.size()}};
  return {{"summary.json", dump(summary)}};
}

int configure_jobs(int jobs, std::ostream& err) {
  if (jobs <= 0) {
    if (const char* env = std::getenv("REACHLAB_JOBS")) {
      try {
        jobs = std::stoi(env);
      } catch (const std::exception&) {
        err << "error: REACHLAB_JOBS must be a positive integer\n";
        return kExitConfig;
      }
      if (jobs <= 0) {
        err << "error: REACHLAB_JOBS must be a positive integer\n";
        return kExitConfig;
      }
    }
  }
  if (jobs > 0) omp_set_num_threads(jobs);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Reachable-set approximation and continuity lab for control-affine systems."};
  app.footer("\n" + config_schema_help());
  app.require_subcommand(1, 1);
  for (const auto& [name, description] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", opt.config, "config file or built-in demo name")->required();
    sub->add_option("--out", opt.out, "output directory (overrides config `out`)");
    sub->add_option("--seed", opt.seed, "overrides spec.seed");
    sub->add_option("--t", opt.t, "overrides the horizon t")->check(CLI::PositiveNumber);
    sub->add_option("--delta", opt.deltas, "perturbation size (repeatable; overrides experiment.deltas)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--jobs", opt.jobs, "worker threads (default: REACHLAB_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    if (std::string(name) == "hausdorff") {
      sub->add_option("--a", opt.cloud_a, "first cloud CSV");
      sub->add_option("--b", opt.cloud_b, "second cloud CSV");
      // With both clouds given, the config is not needed.
      sub->get_option("--config")->required(false);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  opt.command = app.get_subcommands().front()->get_name();

  if (int rc = configure_jobs(opt.jobs, err); rc != kExitOk) return rc;

  Artifacts files;
  std::string out_dir;
  try {
    const bool clouds_given = !opt.cloud_a.empty() || !opt.cloud_b.empty();
    if (opt.command == "hausdorff" && clouds_given) {
      if (opt.cloud_a.empty() || opt.cloud_b.empty()) throw ConfigError(0, "--a/--b", "both clouds are required");
      out_dir = opt.out.empty() ? "out" : opt.out;
      files = hausdorff_files(opt);
    } else {
      if (opt.config.empty()) throw ConfigError(0, "--config", "required");
      ExperimentConfig cfg = load_config(opt.config);
      if (opt.seed) cfg.spec.seed = *opt.seed;
      if (opt.t) cfg.t = *opt.t;
      if (!opt.deltas.empty()) cfg.experiment.deltas = opt.deltas;
      out_dir = opt.out.empty() ? cfg.output_dir : opt.out;
      files = Runner(opt, std::move(cfg)).execute();
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ExprError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  try {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, text] : files) write_text_file((std::filesystem::path(out_dir) / name).string(), text);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace reachlab
