#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reachlab/integrate.hpp"
#include "reachlab/metric.hpp"
#include "reachlab/omega.hpp"

namespace reachlab {

enum class SamplingMode { Exhaustive, Random };

/// Finite parameterization of the piecewise-constant controls on [0, t].
struct ReachSpec {
  int switches = 4;               ///< N: uniform pieces on [0, t]
  int value_resolution = 2;       ///< k: passed to omega_net
  double step = 0.01;             ///< h: RK4 step
  double resolution = 0.005;      ///< r: dedup grid (0 = exact duplicates only)
  SamplingMode mode = SamplingMode::Exhaustive;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;   ///< random mode: number of control sequences
  std::size_t budget = 2000000;   ///< cap on integrated trajectories
  /// Length of one control piece; 0 means t / switches. Fixing it lets clouds
  /// for different horizons share their switching grid.
  double piece_duration = 0.0;

  bool operator==(const ReachSpec&) const = default;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A trajectory blew up; `sequence` lists the net indices of the offending
/// control pieces.
class ReachError : public Error {
 public:
  ReachError(const std::string& message, std::vector<std::size_t> sequence)
      : Error(message), sequence_(std::move(sequence)) {}
  const std::vector<std::size_t>& sequence() const noexcept { return sequence_; }

 private:
  std::vector<std::size_t> sequence_;
};

/// Switching breakpoints of the control pieces on [0, horizon].
std::vector<double> piece_breakpoints(double horizon, const ReachSpec& spec);

/// Number of trajectories the spec integrates (saturates at SIZE_MAX).
std::size_t trajectory_count(std::size_t net_size, std::size_t pieces, const ReachSpec& spec);

/// Point cloud of every grid state of every sampled control sequence on
/// [0, t], quantized at spec.resolution; always contains x0.
///
/// Exhaustive mode walks the tree of control sequences depth first, so each
/// shared prefix is integrated once, and distributes subtrees over OpenMP
/// threads.
PointCloud reachable_cloud(const ControlAffineSystem& system, std::span<const double> x0, double t,
                           const OmegaSet& omega, const ReachSpec& spec);

/// Reference kernel: one independent integrate_trajectory call per control
/// sequence, single-threaded. Produces the same cloud as reachable_cloud.
PointCloud reachable_cloud_serial(const ControlAffineSystem& system, std::span<const double> x0,
                                  double t, const OmegaSet& omega, const ReachSpec& spec);

/// Next level: doubles N, increments k, halves h, r (and piece_duration).
ReachSpec refine(const ReachSpec& spec);

struct ConvergenceLevel {
  int level = 0;          ///< gap between cloud(level) and cloud(level + 1)
  ReachSpec spec;         ///< spec of cloud(level + 1)
  std::size_t points = 0; ///< size of cloud(level + 1)
  double gap = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  std::optional<bool> strictly_decreasing;  ///< unset when only one gap exists
  double final_resolution = 0.0;
};

/// Hausdorff gaps between successive refinement levels: `levels` gaps from
/// levels + 1 clouds.
ConvergenceStudy convergence_study(const ControlAffineSystem& system, std::span<const double> x0,
                                   double t, const OmegaSet& omega, const ReachSpec& spec,
                                   int levels);

}  // namespace reachlab
