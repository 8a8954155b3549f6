#include "reachlab/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace reachlab {

BlowUpError::BlowUpError(double time, const std::string& detail)
    : Error([&] {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", time);
        return "solution blew up at t=" + std::string(buf) + ": " + detail;
      }()),
      time_(time) {}

std::vector<double> time_grid(std::span<const double> breakpoints, double horizon, double step) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw PreconditionError("integration horizon must be positive and finite");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw PreconditionError("integration step must be positive and finite");
  }
  const double eps = 1e-9 * step;
  std::vector<double> candidates;
  for (std::size_t i = 1;; ++i) {
    const double t = static_cast<double>(i) * step;
    if (t >= horizon - eps) break;
    candidates.push_back(t);
  }
  for (double b : breakpoints) {
    if (b > eps && b < horizon - eps) candidates.push_back(b);
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> grid{0.0};
  for (double t : candidates) {
    if (t > grid.back() + eps) grid.push_back(t);
  }
  grid.push_back(horizon);
  return grid;
}

Rk4Stepper::Rk4Stepper(const ControlAffineSystem& system)
    : system_(&system),
      k1_(system.state_dim()),
      k2_(system.state_dim()),
      k3_(system.state_dim()),
      k4_(system.state_dim()),
      tmp_(system.state_dim()) {}

void Rk4Stepper::step(std::span<double> x, std::span<const double> u, double dt) {
  const std::size_t n = x.size();
  const double half = 0.5 * dt;
  system_->rhs(x, u, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + half * k1_[i];
  system_->rhs(tmp_, u, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + half * k2_[i];
  system_->rhs(tmp_, u, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
  system_->rhs(tmp_, u, k4_);
  const double sixth = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
}

void check_state(std::span<const double> x, double time) {
  double sum = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw BlowUpError(time, "non-finite state");
    sum += v * v;
  }
  if (!std::isfinite(sum) || std::sqrt(sum) > kBlowUpNorm) {
    throw BlowUpError(time, "state norm exceeds 1e12");
  }
}

Trajectory integrate_trajectory(const ControlAffineSystem& system, std::span<const double> x0,
                                const PiecewiseConstantControl& u, double horizon, double step) {
  if (x0.size() != system.state_dim()) throw DimensionError("initial state has wrong dimension");
  if (u.dim() != system.control_dim()) throw DimensionError("control has wrong dimension");
  if (step > horizon) throw PreconditionError("integration step exceeds horizon");

  Trajectory traj;
  traj.dim = x0.size();
  traj.times = time_grid(u.breakpoints(), horizon, step);
  traj.states.reserve(traj.times.size() * traj.dim);
  check_state(x0, 0.0);
  traj.states.insert(traj.states.end(), x0.begin(), x0.end());

  Vector x(x0.begin(), x0.end());
  Rk4Stepper stepper(system);
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    const double a = traj.times[i], b = traj.times[i + 1];
    // Every step lies inside one control piece; sample at its midpoint.
    stepper.step(x, u.value_at(0.5 * (a + b)), b - a);
    check_state(x, b);
    traj.states.insert(traj.states.end(), x.begin(), x.end());
  }
  return traj;
}

Vector flow_endpoint(const ControlAffineSystem& system, std::span<const double> x0,
                     const PiecewiseConstantControl& u, double s, double step) {
  if (s < 0.0) throw PreconditionError("flow_endpoint: time must be nonnegative");
  if (x0.size() != system.state_dim()) throw DimensionError("initial state has wrong dimension");
  if (s == 0.0) return Vector(x0.begin(), x0.end());
  const auto traj = integrate_trajectory(system, x0, u, s, std::min(step, s));
  const auto last = traj.final_state();
  return Vector(last.begin(), last.end());
}

}  // namespace reachlab
