#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reachlab/expr.hpp"

namespace reachlab {

using Vector = std::vector<double>;

/// x' = f0(x) + sum_i u_i f_i(x) on R^n with m controls.
class ControlAffineSystem {
 public:
  /// `drift` has n entries; `controlled` has m lists of n entries each.
  /// Expressions may reference only x0 … x{n-1}.
  ControlAffineSystem(std::size_t n, std::size_t m, const std::vector<std::string>& drift,
                      const std::vector<std::vector<std::string>>& controlled);

  std::size_t state_dim() const noexcept { return n_; }
  std::size_t control_dim() const noexcept { return m_; }

  const std::vector<Expr>& drift() const noexcept { return drift_; }
  const std::vector<std::vector<Expr>>& controlled() const noexcept { return controlled_; }

  /// out = f0(x) + sum_i u_i f_i(x). `out` must have n entries.
  void rhs(std::span<const double> x, std::span<const double> u, std::span<double> out) const;
  Vector rhs(std::span<const double> x, std::span<const double> u) const;

  /// Frobenius norm of the n×m matrix [f_1(x) … f_m(x)].
  double control_gain(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<Expr> drift_;
  std::vector<std::vector<Expr>> controlled_;
};

class OmegaSet;

/// Right-continuous step function: value k (0-based) holds on
/// [breakpoints[k], breakpoints[k+1]); `extension` holds outside
/// [breakpoints.front(), breakpoints.back()).
class PiecewiseConstantControl {
 public:
  PiecewiseConstantControl() = default;

  /// `values` holds one m-vector per piece. Breakpoints must be strictly
  /// increasing with at least two entries.
  PiecewiseConstantControl(std::vector<double> breakpoints, std::vector<Vector> values,
                           Vector extension);

  /// Constant `value` on [0, horizon], also used as extension.
  static PiecewiseConstantControl constant(Vector value, double horizon);

  std::size_t dim() const noexcept { return extension_.size(); }
  std::size_t pieces() const noexcept { return values_.size(); }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<Vector>& values() const noexcept { return values_; }
  const Vector& extension() const noexcept { return extension_; }

  /// Index of the piece active at `s`, or npos when the extension applies.
  std::size_t piece_at(double s) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const Vector& value_at(double s) const noexcept;

  /// True when every value and the extension lie within `tol` of `omega`.
  bool admissible(const OmegaSet& omega, double tol = 1e-9) const;

  bool operator==(const PiecewiseConstantControl&) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<Vector> values_;
  Vector extension_;
};

Vector rhs(const ControlAffineSystem& system, std::span<const double> x, std::span<const double> u);
Vector control_value(const PiecewiseConstantControl& u, double s);

}  // namespace reachlab
