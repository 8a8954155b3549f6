#pragma once

#include <algorithm>
#include <limits>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace reachlab::detail {

// Squared distance accumulated in coordinate order. Every kernel uses this
// one routine so that indexed and brute-force searches agree bit for bit.
inline double squared_distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Static k-d tree over a row-major point array (not owned). Splits on the
// widest axis at the median; leaves hold up to kLeafSize points.
class KdTree {
 public:
  KdTree(const double* coords, std::size_t count, std::size_t dim)
      : coords_(coords), dim_(dim), order_(count) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * count / kLeafSize + 2);
    if (count > 0) build(0, count);
  }

  // Smallest squared distance from `q` to the tree's points. The search may
  // stop as soon as a candidate at or below `stop_at` is found, in which case
  // the returned value is that candidate (<= stop_at).
  double nearest_squared(const double* q, double stop_at = -1.0) const {
    double best = std::numeric_limits<double>::infinity();
    search(0, q, best, stop_at);
    return best;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin, end;
    std::size_t axis = 0;
    double split = 0.0;
    int left = -1, right = -1;
  };

  const double* point(std::size_t idx) const { return coords_ + idx * dim_; }

  int build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
      double lo = point(order_[begin])[a], hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = point(order_[i])[a];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        axis = a;
      }
    }
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t l, std::size_t r) { return point(l)[axis] < point(r)[axis]; });
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double split = point(order_[mid])[axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  // Returns true once a point within stop_at has been found.
  bool search(int id, const double* q, double& best, double stop_at) const {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const double d = squared_distance(q, point(order_[i]), dim_);
        if (d < best) best = d;
      }
      return best <= stop_at;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    if (search(near, q, best, stop_at)) return true;
    // Points across the plane differ by at least |diff| on this axis, and the
    // rounded squared distance is monotone in each term.
    if (diff * diff <= best) return search(far, q, best, stop_at);
    return false;
  }

  const double* coords_;
  std::size_t dim_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace reachlab::detail
