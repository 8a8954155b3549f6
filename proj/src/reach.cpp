#include "reachlab/reach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reachlab {

namespace {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

void validate(const ControlAffineSystem& system, std::span<const double> x0, double t,
              const OmegaSet& omega, const ReachSpec& spec) {
  if (x0.size() != system.state_dim()) throw DimensionError("initial state has wrong dimension");
  if (omega.dim() != system.control_dim()) {
    throw DimensionError("omega lives in R^" + std::to_string(omega.dim()) +
                         " but the system has m=" + std::to_string(system.control_dim()));
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("horizon t must be positive");
  if (spec.switches < 1) throw PreconditionError("spec: switch count N must be at least 1");
  if (spec.value_resolution < 1) throw PreconditionError("spec: value resolution k must be at least 1");
  if (!(spec.step > 0.0)) throw PreconditionError("spec: step h must be positive");
  if (!(spec.resolution >= 0.0)) throw PreconditionError("spec: resolution r must be nonnegative");
  if (spec.piece_duration < 0.0) throw PreconditionError("spec: piece duration must be nonnegative");
}

struct Plan {
  std::vector<Vector> net;
  std::vector<double> breakpoints;
  std::vector<double> grid;
  std::vector<std::size_t> first_step;  // steps of piece p: [first_step[p], first_step[p+1])
  double step = 0.0;

  std::size_t pieces() const { return breakpoints.size() - 1; }
};

Plan make_plan(double t, const OmegaSet& omega, const ReachSpec& spec) {
  Plan plan;
  plan.net = omega_net(omega, spec.value_resolution, true);
  plan.breakpoints = piece_breakpoints(t, spec);
  plan.step = std::min(spec.step, t);
  plan.grid = time_grid(plan.breakpoints, t, plan.step);
  const std::size_t pieces = plan.pieces();
  plan.first_step.assign(pieces + 1, plan.grid.size() - 1);
  std::size_t piece = 0;
  plan.first_step[0] = 0;
  for (std::size_t s = 0; s + 1 < plan.grid.size(); ++s) {
    const double mid = 0.5 * (plan.grid[s] + plan.grid[s + 1]);
    while (piece + 1 < pieces && mid >= plan.breakpoints[piece + 1]) {
      ++piece;
      plan.first_step[piece] = s;
    }
  }
  return plan;
}

PiecewiseConstantControl control_for(const Plan& plan, std::span<const std::size_t> sequence) {
  std::vector<Vector> values;
  values.reserve(sequence.size());
  for (std::size_t idx : sequence) values.push_back(plan.net[idx]);
  Vector extension = values.front();
  return PiecewiseConstantControl(plan.breakpoints, std::move(values), std::move(extension));
}

std::string describe_sequence(const Plan& plan, std::span<const std::size_t> sequence) {
  std::string s = "[";
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (i) s += ", ";
    s += "(";
    const Vector& v = plan.net[sequence[i]];
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j) s += ", ";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v[j]);
      s += buf;
    }
    s += ")";
  }
  return s + "]";
}

// Depth-first enumeration of control sequences below a fixed prefix.
class TreeWalker {
 public:
  TreeWalker(const ControlAffineSystem& system, const Plan& plan, CloudBuilder& out)
      : plan_(plan), stepper_(system), out_(out), states_(plan.pieces() + 1), sequence_(plan.pieces()) {}

  // Integrates the prefix digits, then every continuation.
  void run(std::span<const double> x0, std::span<const std::size_t> prefix) {
    states_[0].assign(x0.begin(), x0.end());
    for (std::size_t p = 0; p < prefix.size(); ++p) {
      sequence_[p] = prefix[p];
      advance(p, prefix[p]);
    }
    descend(prefix.size());
  }

  std::span<const std::size_t> sequence(std::size_t depth) const { return {sequence_.data(), depth}; }
  std::size_t failed_depth() const noexcept { return failed_depth_; }

 private:
  void advance(std::size_t piece, std::size_t value) {
    failed_depth_ = piece + 1;
    states_[piece + 1] = states_[piece];
    Vector& x = states_[piece + 1];
    const Vector& u = plan_.net[value];
    for (std::size_t s = plan_.first_step[piece]; s < plan_.first_step[piece + 1]; ++s) {
      stepper_.step(x, u, plan_.grid[s + 1] - plan_.grid[s]);
      check_state(x, plan_.grid[s + 1]);
      out_.add(x);
    }
  }

  void descend(std::size_t piece) {
    if (piece == plan_.pieces()) return;
    for (std::size_t v = 0; v < plan_.net.size(); ++v) {
      sequence_[piece] = v;
      advance(piece, v);
      descend(piece + 1);
    }
  }

  const Plan& plan_;
  Rk4Stepper stepper_;
  CloudBuilder& out_;
  std::vector<Vector> states_;
  std::vector<std::size_t> sequence_;
  std::size_t failed_depth_ = 0;
};

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && result > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    result *= base;
  }
  return result;
}

void check_budget(std::size_t count, const ReachSpec& spec) {
  if (count > spec.budget) {
    throw BudgetError("reachable cloud needs " +
                      (count == std::numeric_limits<std::size_t>::max() ? std::string("more than 2^64")
                                                                         : std::to_string(count)) +
                      " trajectories, above the budget of " + std::to_string(spec.budget) +
                      "; lower N or k, raise the budget, or use random mode");
  }
}

std::vector<std::size_t> random_sequences(const Plan& plan, const ReachSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, plan.net.size() - 1);
  std::vector<std::size_t> seqs(spec.samples * plan.pieces());
  for (auto& s : seqs) s = pick(rng);
  return seqs;
}

struct Failure {
  std::vector<std::size_t> sequence;
  std::string message;
};

[[noreturn]] void raise(const Plan& plan, const Failure& f) {
  throw ReachError("trajectory under control sequence " + describe_sequence(plan, f.sequence) +
                       " failed: " + f.message,
                   f.sequence);
}

}  // namespace

std::vector<double> piece_breakpoints(double horizon, const ReachSpec& spec) {
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  const double duration =
      spec.piece_duration > 0.0 ? spec.piece_duration : horizon / spec.switches;
  const double eps = 1e-9 * std::min(duration, horizon);
  std::vector<double> bps{0.0};
  for (std::size_t j = 1;; ++j) {
    const double b = static_cast<double>(j) * duration;
    if (b >= horizon - eps) break;
    bps.push_back(b);
  }
  bps.push_back(horizon);
  return bps;
}

std::size_t trajectory_count(std::size_t net_size, std::size_t pieces, const ReachSpec& spec) {
  if (spec.mode == SamplingMode::Random) return spec.samples;
  return saturating_pow(net_size, pieces);
}

PointCloud reachable_cloud(const ControlAffineSystem& system, std::span<const double> x0, double t,
                           const OmegaSet& omega, const ReachSpec& spec) {
  validate(system, x0, t, omega, spec);
  const Plan plan = make_plan(t, omega, spec);
  const std::size_t pieces = plan.pieces();
  const std::size_t net_size = plan.net.size();
  check_budget(trajectory_count(net_size, pieces, spec), spec);

  const int threads = max_threads();
  std::vector<CloudBuilder> builders(static_cast<std::size_t>(threads),
                                     CloudBuilder(system.state_dim(), spec.resolution));

  std::vector<std::size_t> sequences;
  std::size_t depth = 0;
  std::size_t tasks = 0;
  if (spec.mode == SamplingMode::Exhaustive) {
    // Split the tree at the shallowest depth that gives every thread work.
    const std::size_t want = 16 * static_cast<std::size_t>(threads);
    tasks = 1;
    while (depth < pieces && tasks < want) {
      tasks *= net_size;
      ++depth;
    }
  } else {
    sequences = random_sequences(plan, spec);
    tasks = spec.samples;
    depth = pieces;
  }

  std::vector<std::optional<Failure>> failures(tasks);
  const auto task_count = static_cast<std::ptrdiff_t>(tasks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t task = 0; task < task_count; ++task) {
    const auto ti = static_cast<std::size_t>(task);
    CloudBuilder& out = builders[static_cast<std::size_t>(thread_id())];
    TreeWalker walker(system, plan, out);
    std::vector<std::size_t> prefix(depth);
    if (spec.mode == SamplingMode::Exhaustive) {
      std::size_t rest = ti;
      for (std::size_t p = depth; p-- > 0;) {
        prefix[p] = rest % net_size;
        rest /= net_size;
      }
    } else {
      std::copy_n(sequences.begin() + static_cast<std::ptrdiff_t>(ti * pieces), pieces, prefix.begin());
    }
    try {
      walker.run(x0, prefix);
    } catch (const std::exception& e) {
      const auto seq = walker.sequence(walker.failed_depth());
      failures[ti] = Failure{std::vector<std::size_t>(seq.begin(), seq.end()), e.what()};
    }
  }
  for (const auto& f : failures) {
    if (f) raise(plan, *f);
  }

  CloudBuilder merged(system.state_dim(), spec.resolution);
  merged.add(x0);
  for (auto& b : builders) {
    b.compact();
    merged.merge(std::move(b));
  }
  return std::move(merged).finish();
}

PointCloud reachable_cloud_serial(const ControlAffineSystem& system, std::span<const double> x0,
                                  double t, const OmegaSet& omega, const ReachSpec& spec) {
  validate(system, x0, t, omega, spec);
  const Plan plan = make_plan(t, omega, spec);
  const std::size_t pieces = plan.pieces();
  const std::size_t net_size = plan.net.size();
  const std::size_t count = trajectory_count(net_size, pieces, spec);
  check_budget(count, spec);

  CloudBuilder out(system.state_dim(), spec.resolution);
  out.add(x0);
  const std::vector<std::size_t> random =
      spec.mode == SamplingMode::Random ? random_sequences(plan, spec) : std::vector<std::size_t>{};
  std::vector<std::size_t> seq(pieces, 0);
  for (std::size_t i = 0; i < count; ++i) {
    if (spec.mode == SamplingMode::Random) {
      std::copy_n(random.begin() + static_cast<std::ptrdiff_t>(i * pieces), pieces, seq.begin());
    }
    try {
      const Trajectory traj = integrate_trajectory(system, x0, control_for(plan, seq), t, plan.step);
      for (std::size_t s = 1; s < traj.size(); ++s) out.add(traj.state(s));
    } catch (const std::exception& e) {
      raise(plan, Failure{seq, e.what()});
    }
    if (spec.mode == SamplingMode::Exhaustive) {
      for (std::size_t p = pieces; p-- > 0;) {
        if (++seq[p] < net_size) break;
        seq[p] = 0;
      }
    }
  }
  return std::move(out).finish();
}

ReachSpec refine(const ReachSpec& spec) {
  ReachSpec next = spec;
  next.switches = spec.switches * 2;
  next.value_resolution = spec.value_resolution + 1;
  next.step = spec.step / 2.0;
  next.resolution = spec.resolution / 2.0;
  next.piece_duration = spec.piece_duration / 2.0;
  return next;
}

ConvergenceStudy convergence_study(const ControlAffineSystem& system, std::span<const double> x0,
                                   double t, const OmegaSet& omega, const ReachSpec& spec,
                                   int levels) {
  if (levels < 1) throw PreconditionError("convergence_study: levels must be at least 1");
  ConvergenceStudy study;
  ReachSpec current = spec;
  PointCloud previous = reachable_cloud(system, x0, t, omega, current);
  for (int level = 0; level < levels; ++level) {
    current = refine(current);
    PointCloud next = reachable_cloud(system, x0, t, omega, current);
    study.levels.push_back(ConvergenceLevel{level, current, next.size(), hausdorff(previous, next)});
    previous = std::move(next);
  }
  study.final_resolution = current.resolution;
  if (study.levels.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 1; i < study.levels.size(); ++i) {
      decreasing = decreasing && study.levels[i].gap < study.levels[i - 1].gap;
    }
    study.strictly_decreasing = decreasing;
  }
  return study;
}

}  // namespace reachlab
