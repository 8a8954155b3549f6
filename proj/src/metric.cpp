#include "reachlab/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "kdtree.hpp"

namespace reachlab {

namespace {

constexpr std::size_t kCompactRows = std::size_t{1} << 20;

// Order-preserving bijection between doubles (without -0) and int64.
std::int64_t ordered_bits(double x) {
  if (x == 0.0) x = 0.0;
  auto bits = std::bit_cast<std::int64_t>(x);
  if (bits < 0) bits ^= std::numeric_limits<std::int64_t>::max();
  return bits;
}

double from_ordered_bits(std::int64_t bits) {
  if (bits < 0) bits ^= std::numeric_limits<std::int64_t>::max();
  return std::bit_cast<double>(bits);
}

void check_same_dim(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("point clouds differ in dimension (" + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
}

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, double resolution)
    : dim_(dim), coords_(std::move(coords)), resolution_(resolution) {
  if (dim_ == 0) throw DimensionError("point cloud dimension must be positive");
  if (coords_.empty()) throw PreconditionError("point cloud must be nonempty");
  if (coords_.size() % dim_ != 0) throw DimensionError("coordinate count is not a multiple of dim");
  for (double v : coords_) {
    if (!std::isfinite(v)) throw PreconditionError("point cloud contains a non-finite coordinate");
  }
  if (!(resolution_ >= 0.0)) throw PreconditionError("cloud resolution must be nonnegative");
}

PointCloud PointCloud::from_points(const std::vector<Vector>& points, double resolution) {
  if (points.empty()) throw PreconditionError("point cloud must be nonempty");
  const std::size_t dim = points.front().size();
  std::vector<double> coords;
  coords.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw DimensionError("points differ in dimension");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(dim, std::move(coords), resolution);
}

PointCloud PointCloud::scaled(double factor) const {
  std::vector<double> c(coords_);
  for (double& v : c) v *= factor;
  return PointCloud(dim_, std::move(c), resolution_ * std::fabs(factor));
}

CloudBuilder::CloudBuilder(std::size_t dim, double resolution)
    : dim_(dim), resolution_(resolution) {
  if (dim_ == 0) throw DimensionError("cloud dimension must be positive");
  if (!(resolution_ >= 0.0) || !std::isfinite(resolution_)) {
    throw PreconditionError("cloud resolution must be finite and nonnegative");
  }
}

void CloudBuilder::add(std::span<const double> point) {
  if (point.size() != dim_) throw DimensionError("point has wrong dimension");
  for (double x : point) {
    if (!std::isfinite(x)) throw PreconditionError("cannot add a non-finite point");
    if (resolution_ > 0.0) {
      const double cell = std::nearbyint(x / resolution_);
      if (std::fabs(cell) > 4.0e18) throw PreconditionError("coordinate too large for resolution");
      keys_.push_back(static_cast<std::int64_t>(cell));
    } else {
      keys_.push_back(ordered_bits(x));
    }
  }
  if (buffered() >= compacted_ + kCompactRows) compact();
}

void CloudBuilder::merge(CloudBuilder&& other) {
  if (other.dim_ != dim_ || other.resolution_ != resolution_) {
    throw PreconditionError("cannot merge cloud builders with different layouts");
  }
  if (keys_.empty()) {
    keys_ = std::move(other.keys_);
    compacted_ = other.compacted_;
  } else {
    keys_.insert(keys_.end(), other.keys_.begin(), other.keys_.end());
    compacted_ = 0;
  }
  other.keys_.clear();
  other.compacted_ = 0;
}

void CloudBuilder::compact() {
  const std::size_t rows = buffered();
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::int64_t* k = keys_.data();
  const std::size_t d = dim_;
  auto less = [k, d](std::size_t l, std::size_t r) {
    return std::lexicographical_compare(k + l * d, k + l * d + d, k + r * d, k + r * d + d);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::int64_t> out;
  out.reserve(keys_.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const std::int64_t* row = k + order[i] * d;
    if (!out.empty() && std::equal(row, row + d, out.end() - static_cast<std::ptrdiff_t>(d))) continue;
    out.insert(out.end(), row, row + d);
  }
  keys_ = std::move(out);
  compacted_ = buffered();
}

PointCloud CloudBuilder::finish() && {
  if (compacted_ != buffered()) compact();
  std::vector<double> coords(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    coords[i] = resolution_ > 0.0 ? static_cast<double>(keys_[i]) * resolution_
                                  : from_ordered_bits(keys_[i]);
  }
  return PointCloud(dim_, std::move(coords), resolution_);
}

PointCloud quantize_cloud(const PointCloud& cloud, double resolution) {
  CloudBuilder builder(cloud.dim(), resolution);
  for (std::size_t i = 0; i < cloud.size(); ++i) builder.add(cloud.point(i));
  return std::move(builder).finish();
}

double directed_hausdorff_serial(const PointCloud& a, const PointCloud& b) {
  check_same_dim(a, b);
  const std::size_t dim = a.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, detail::squared_distance(a.point(i).data(), b.point(j).data(), dim));
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double directed_hausdorff(const PointCloud& a, const PointCloud& b) {
  check_same_dim(a, b);
  const detail::KdTree tree(b.coords().data(), b.size(), b.dim());
  const auto count = static_cast<std::ptrdiff_t>(a.size());
  const double* coords = a.coords().data();
  const std::size_t dim = a.dim();
  double worst = 0.0;
#pragma omp parallel
  {
    double local = 0.0;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      // A point already within the running maximum cannot raise it.
      const double d = tree.nearest_squared(coords + static_cast<std::size_t>(i) * dim, local);
      local = std::max(local, d);
    }
#pragma omp critical(reachlab_directed_hausdorff)
    worst = std::max(worst, local);
  }
  return std::sqrt(worst);
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double hausdorff_serial(const PointCloud& a, const PointCloud& b) {
  return std::max(directed_hausdorff_serial(a, b), directed_hausdorff_serial(b, a));
}

bool within_neighborhood(const PointCloud& a, const PointCloud& b, double eps) {
  return directed_hausdorff(a, b) <= eps;
}

TestFunctionDictionary dyadic_dictionary(std::size_t m, double window, int depth) {
  if (m == 0) throw DimensionError("dictionary dimension must be positive");
  if (!(window > 0.0)) throw PreconditionError("dictionary window must be positive");
  if (depth < 0) throw PreconditionError("dictionary depth must be nonnegative");
  TestFunctionDictionary dict;
  dict.window = window;
  const Vector zero(m, 0.0);
  for (std::size_t coord = 0; coord < m; ++coord) {
    Vector e(m, 0.0);
    e[coord] = 1.0;
    for (int level = 0; level <= depth; ++level) {
      const std::size_t parts = std::size_t{1} << level;
      for (std::size_t j = 0; j < parts; ++j) {
        const double a = window * static_cast<double>(j) / static_cast<double>(parts);
        const double b = window * static_cast<double>(j + 1) / static_cast<double>(parts);
        dict.functions.emplace_back(std::vector<double>{a, b}, std::vector<Vector>{e}, zero);
      }
    }
  }
  return dict;
}

double weak_star_discrepancy(const PiecewiseConstantControl& u, const PiecewiseConstantControl& v,
                             const TestFunctionDictionary& dictionary) {
  const std::size_t m = u.dim();
  if (v.dim() != m) throw DimensionError("weak_star_discrepancy: controls differ in dimension");
  for (const auto& f : dictionary.functions) {
    if (f.dim() != m) throw DimensionError("weak_star_discrepancy: test function dimension mismatch");
  }
  const double window = dictionary.window;
  std::vector<double> cuts{0.0, window};
  auto collect = [&](const PiecewiseConstantControl& c) {
    for (double t : c.breakpoints()) {
      if (t > 0.0 && t < window) cuts.push_back(t);
    }
  };
  collect(u);
  collect(v);
  for (const auto& f : dictionary.functions) collect(f);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> integrals(dictionary.functions.size(), 0.0);
  Vector diff(m);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    const double mid = 0.5 * (a + b);
    const Vector& uv = u.value_at(mid);
    const Vector& vv = v.value_at(mid);
    for (std::size_t i = 0; i < m; ++i) diff[i] = uv[i] - vv[i];
    for (std::size_t f = 0; f < dictionary.functions.size(); ++f) {
      const Vector& w = dictionary.functions[f].value_at(mid);
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += diff[i] * w[i];
      integrals[f] += (b - a) * dot;
    }
  }
  double worst = 0.0;
  for (double x : integrals) worst = std::max(worst, std::fabs(x));
  return worst;
}

}  // namespace reachlab
