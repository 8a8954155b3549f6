#include "reachlab/system.hpp"

#include <algorithm>
#include <cmath>

#include "reachlab/omega.hpp"

namespace reachlab {

ControlAffineSystem::ControlAffineSystem(std::size_t n, std::size_t m,
                                         const std::vector<std::string>& drift,
                                         const std::vector<std::vector<std::string>>& controlled)
    : n_(n), m_(m) {
  if (n == 0) throw PreconditionError("state dimension n must be positive");
  if (m == 0) throw PreconditionError("control dimension m must be positive");
  if (drift.size() != n) {
    throw DimensionError("drift has " + std::to_string(drift.size()) + " components, expected n=" +
                         std::to_string(n));
  }
  if (controlled.size() != m) {
    const std::size_t first = std::min(controlled.size(), m) + 1;
    throw DimensionError("expected m=" + std::to_string(m) + " controlled fields, got " +
                         std::to_string(controlled.size()) + " (f" + std::to_string(first) +
                         (controlled.size() < m ? " missing)" : " unexpected)"));
  }
  const auto names = state_variable_names(n);
  drift_.reserve(n);
  for (const auto& src : drift) drift_.push_back(Expr::parse(src, names));
  controlled_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (controlled[i].size() != n) {
      throw DimensionError("f" + std::to_string(i + 1) + " has " +
                           std::to_string(controlled[i].size()) + " components, expected n=" +
                           std::to_string(n));
    }
    for (const auto& src : controlled[i]) controlled_[i].push_back(Expr::parse(src, names));
  }
}

void ControlAffineSystem::rhs(std::span<const double> x, std::span<const double> u,
                              std::span<double> out) const {
  if (x.size() != n_ || u.size() != m_ || out.size() != n_) {
    throw DimensionError("rhs: expected x in R^" + std::to_string(n_) + ", u in R^" +
                         std::to_string(m_));
  }
  for (std::size_t j = 0; j < n_; ++j) {
    double v = drift_[j].eval(x);
    for (std::size_t i = 0; i < m_; ++i) v += u[i] * controlled_[i][j].eval(x);
    out[j] = v;
  }
}

Vector ControlAffineSystem::rhs(std::span<const double> x, std::span<const double> u) const {
  Vector out(n_);
  rhs(x, u, out);
  return out;
}

double ControlAffineSystem::control_gain(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& field : controlled_) {
    for (const auto& comp : field) {
      const double v = comp.eval(x);
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<double> breakpoints,
                                                   std::vector<Vector> values, Vector extension)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      extension_(std::move(extension)) {
  if (values_.empty()) throw PreconditionError("control needs at least one piece");
  if (breakpoints_.size() != values_.size() + 1) {
    throw PreconditionError("control needs pieces+1 breakpoints");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw PreconditionError("control breakpoints must be strictly increasing");
    }
  }
  for (const auto& v : values_) {
    if (v.size() != extension_.size()) throw DimensionError("control values differ in dimension");
  }
}

PiecewiseConstantControl PiecewiseConstantControl::constant(Vector value, double horizon) {
  return PiecewiseConstantControl({0.0, horizon}, {value}, value);
}

std::size_t PiecewiseConstantControl::piece_at(double s) const noexcept {
  if (s < breakpoints_.front() || s >= breakpoints_.back()) return npos;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

const Vector& PiecewiseConstantControl::value_at(double s) const noexcept {
  const std::size_t k = piece_at(s);
  return k == npos ? extension_ : values_[k];
}

bool PiecewiseConstantControl::admissible(const OmegaSet& omega, double tol) const {
  if (!omega_contains(omega, extension_, tol)) return false;
  return std::all_of(values_.begin(), values_.end(),
                     [&](const Vector& v) { return omega_contains(omega, v, tol); });
}

Vector rhs(const ControlAffineSystem& system, std::span<const double> x, std::span<const double> u) {
  return system.rhs(x, u);
}

Vector control_value(const PiecewiseConstantControl& u, double s) { return u.value_at(s); }

}  // namespace reachlab
