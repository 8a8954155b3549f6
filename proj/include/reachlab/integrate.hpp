#pragma once

#include <span>
#include <vector>

#include "reachlab/system.hpp"

namespace reachlab {

inline constexpr double kBlowUpNorm = 1e12;

/// A state left the finite region (norm above kBlowUpNorm or non-finite).
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& detail);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// States of one solution recorded on its integration grid.
struct Trajectory {
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<double> states;  // row-major, dim entries per time

  std::size_t size() const noexcept { return times.size(); }
  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * dim, dim};
  }
  std::span<const double> final_state() const { return state(size() - 1); }
};

/// Integration grid on [0, horizon]: every multiple of `step` and every
/// breakpoint in (0, horizon), merged, with horizon appended. Candidates
/// closer than 1e-9·step to an earlier grid time are dropped, so grids for
/// nested horizons share their common prefix.
std::vector<double> time_grid(std::span<const double> breakpoints, double horizon, double step);

/// Classical RK4 with reusable scratch space. One instance per thread.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(const ControlAffineSystem& system);

  /// Advances `x` in place by `dt` under the constant control `u`.
  void step(std::span<double> x, std::span<const double> u, double dt);

 private:
  const ControlAffineSystem* system_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Throws BlowUpError when `x` is non-finite or exceeds kBlowUpNorm.
void check_state(std::span<const double> x, double time);

/// Solution of the control-affine system from `x0` under `u` on [0, horizon],
/// fixed step `step`, with steps split at the control's breakpoints.
Trajectory integrate_trajectory(const ControlAffineSystem& system, std::span<const double> x0,
                                const PiecewiseConstantControl& u, double horizon, double step);

/// phi(s, x0, u).
Vector flow_endpoint(const ControlAffineSystem& system, std::span<const double> x0,
                     const PiecewiseConstantControl& u, double s, double step);

}  // namespace reachlab
