#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reachlab/system.hpp"

namespace reachlab {

/// Finite nonempty set of points in R^n, stored row-major.
///
/// `resolution` is the grid spacing the cloud was quantized with (0 when only
/// exact duplicates were merged); downstream tolerances read it from here.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> coords, double resolution = 0.0);
  static PointCloud from_points(const std::vector<Vector>& points, double resolution = 0.0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  double resolution() const noexcept { return resolution_; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }

  /// Each point multiplied by `factor` (resolution scales too).
  PointCloud scaled(double factor) const;

  bool operator==(const PointCloud&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  double resolution_;
};

/// Accumulates points, snapping each to the grid resolution·Z^n (or keeping
/// exact values when resolution is 0). finish() returns the distinct points in
/// lexicographic order, so the result does not depend on insertion order.
class CloudBuilder {
 public:
  CloudBuilder(std::size_t dim, double resolution);

  void add(std::span<const double> point);
  /// Moves all points of `other` into this builder.
  void merge(CloudBuilder&& other);
  /// Sorts and deduplicates the buffered keys.
  void compact();
  std::size_t buffered() const noexcept { return keys_.size() / dim_; }
  PointCloud finish() &&;

 private:
  std::size_t dim_;
  double resolution_;
  std::vector<std::int64_t> keys_;
  std::size_t compacted_ = 0;
};

/// Snap to the grid of spacing `resolution`, one point per cell. The result
/// is within resolution·sqrt(n)/2 of the input in Hausdorff distance.
PointCloud quantize_cloud(const PointCloud& cloud, double resolution);

/// max over a in A of min over b in B of |a-b|. Uses a k-d tree over B and an
/// OpenMP loop over A; the result is bit-identical to the brute-force kernel.
double directed_hausdorff(const PointCloud& a, const PointCloud& b);
/// O(|A||B|) reference kernel, single-threaded.
double directed_hausdorff_serial(const PointCloud& a, const PointCloud& b);

double hausdorff(const PointCloud& a, const PointCloud& b);
double hausdorff_serial(const PointCloud& a, const PointCloud& b);

/// A ⊂ N_eps(B) in the closed sense: directed_hausdorff(a, b) <= eps.
bool within_neighborhood(const PointCloud& a, const PointCloud& b, double eps);

/// Step functions on [0, window] used as L1 test functions; each vanishes
/// outside its breakpoints (zero extension).
struct TestFunctionDictionary {
  double window = 1.0;
  std::vector<PiecewiseConstantControl> functions;
};

/// Indicators of the dyadic subintervals of [0, window] for depths 0..depth,
/// one per control coordinate: m·(2^(depth+1) - 1) functions.
TestFunctionDictionary dyadic_dictionary(std::size_t m, double window, int depth);

/// max over the dictionary of |∫_0^window <u(s) - v(s), x_i(s)> ds|, computed
/// exactly on the merged breakpoint partition.
double weak_star_discrepancy(const PiecewiseConstantControl& u, const PiecewiseConstantControl& v,
                             const TestFunctionDictionary& dictionary);

}  // namespace reachlab
