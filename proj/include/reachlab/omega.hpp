#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "reachlab/system.hpp"

namespace reachlab {

struct Box {
  Vector lower;
  Vector upper;
  bool operator==(const Box&) const = default;
};

struct Ball {
  Vector center;
  double radius = 0.0;
  bool operator==(const Ball&) const = default;
};

struct Hull {
  std::vector<Vector> vertices;
  bool operator==(const Hull&) const = default;
};

/// Raised when the hull projection exhausts its iteration cap.
class ProjectionError : public Error {
 public:
  using Error::Error;
};

/// Nonempty compact convex control range in R^m.
class OmegaSet {
 public:
  using Shape = std::variant<Box, Ball, Hull>;

  static OmegaSet box(Vector lower, Vector upper);
  static OmegaSet ball(Vector center, double radius);
  static OmegaSet hull(std::vector<Vector> vertices);

  std::size_t dim() const noexcept { return dim_; }
  const Shape& shape() const noexcept { return shape_; }

  /// Box/Ball center, or the vertex average of a hull. Always a member.
  Vector center() const;

  /// max over the set of the distance to center().
  double radius_about_center() const;

  bool operator==(const OmegaSet&) const = default;

 private:
  OmegaSet(Shape shape, std::size_t dim) : shape_(std::move(shape)), dim_(dim) {}

  Shape shape_;
  std::size_t dim_ = 0;
};

inline constexpr std::size_t kDefaultDirections = 4096;
inline constexpr std::uint64_t kDirectionSeed = 0x5eedULL;
inline constexpr int kHullIterationCap = 10000;

/// dist(p, omega) <= tol.
bool omega_contains(const OmegaSet& omega, std::span<const double> p, double tol);

/// Euclidean nearest point of omega to p.
Vector omega_project(const OmegaSet& omega, std::span<const double> p);

/// Support function h(d) = max over omega of <w, d>; `d` must be a unit vector.
double omega_support(const OmegaSet& omega, std::span<const double> d);

/// Hausdorff distance between two control ranges as the largest support
/// function gap over a deterministic direction net. Exact for m = 1.
double omega_hausdorff(const OmegaSet& a, const OmegaSet& b,
                       std::size_t directions = kDefaultDirections);

/// Convex superset within Hausdorff distance gamma·sqrt(m) (Box) or exactly
/// gamma (Ball). Box bounds grow by gamma on every axis, so for m > 1 the
/// result over-approximates N_gamma by at most gamma·(sqrt(m)-1). Hulls are
/// rejected; use omega_homothety for them.
OmegaSet omega_inflate(const OmegaSet& omega, double gamma);

/// center + factor·(omega - center), with center = omega.center().
/// d_H(omega, result) = |1 - factor|·radius_about_center().
OmegaSet omega_homothety(const OmegaSet& omega, double factor);

/// Inward homothety at Hausdorff distance min(delta, radius_about_center()).
OmegaSet omega_shrink(const OmegaSet& omega, double delta);

/// factor·omega (scaling about the origin).
OmegaSet omega_scale(const OmegaSet& omega, double factor);

/// Deterministic finite subset of omega; see README for the layout per variant.
std::vector<Vector> omega_net(const OmegaSet& omega, int k, bool include_extreme = true);

/// Upper estimate of sup over omega of the distance to omega_net(omega, k, true).
double omega_net_mesh(const OmegaSet& omega, int k);

/// Same breakpoints, every value and the extension projected onto `target`.
PiecewiseConstantControl transport_control(const PiecewiseConstantControl& u,
                                           const OmegaSet& target);

/// Deterministic unit vectors in R^m: {±1} for m = 1, equally spaced angles
/// for m = 2, a Fibonacci sphere for m = 3, ±e_i followed by seeded Gaussian
/// directions for m > 3.
std::vector<Vector> direction_net(std::size_t m, std::size_t count,
                                  std::uint64_t seed = kDirectionSeed);

}  // namespace reachlab
