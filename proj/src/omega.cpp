#include "reachlab/omega.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace reachlab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_dim(const OmegaSet& omega, std::size_t size, const char* what) {
  if (size != omega.dim()) {
    throw DimensionError(std::string(what) + ": expected a vector in R^" +
                         std::to_string(omega.dim()) + ", got R^" + std::to_string(size));
  }
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw PreconditionError(std::string(what) + ": non-finite coordinate");
  }
}

// Minimum-norm point of conv{v_i - p} by Wolfe's active-set method; the
// returned point is p plus that minimizer.
Vector project_hull(const Hull& hull, std::span<const double> p) {
  const std::size_t m = p.size();
  const std::size_t count = hull.vertices.size();
  Eigen::MatrixXd pts(m, count);
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t r = 0; r < m; ++r) pts(r, i) = hull.vertices[i][r] - p[r];
    scale = std::max(scale, pts.col(i).squaredNorm());
  }
  if (scale == 0.0) return Vector(p.begin(), p.end());

  std::size_t first = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (pts.col(i).squaredNorm() < pts.col(first).squaredNorm()) first = i;
  }
  std::vector<std::size_t> corral{first};
  std::vector<double> weights{1.0};
  Eigen::VectorXd x = pts.col(first);

  constexpr double kWeightEps = 1e-15;
  const double gap_tol = 1e-15 * scale;
  int iterations = 0;

  auto affine_minimizer = [&](const std::vector<std::size_t>& idx) {
    const auto s = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = pts.col(idx[a]).dot(pts.col(idx[b]));
      kkt(a, s) = 1.0;
      kkt(s, a) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs(s) = 1.0;
    Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return Eigen::VectorXd(sol.head(s));
  };

  for (;;) {
    if (++iterations > kHullIterationCap) {
      throw ProjectionError("hull projection did not converge within " +
                            std::to_string(kHullIterationCap) + " iterations");
    }
    Eigen::Index best = 0;
    (x.transpose() * pts).minCoeff(&best);
    const auto j = static_cast<std::size_t>(best);
    const double gap = x.squaredNorm() - x.dot(pts.col(j));
    if (gap <= gap_tol) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);
    weights.push_back(0.0);

    for (;;) {
      if (++iterations > kHullIterationCap) {
        throw ProjectionError("hull projection did not converge within " +
                              std::to_string(kHullIterationCap) + " iterations");
      }
      Eigen::VectorXd alpha = affine_minimizer(corral);
      if (alpha.minCoeff() > kWeightEps) {
        for (std::size_t i = 0; i < corral.size(); ++i) weights[i] = alpha(i);
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (alpha(i) <= kWeightEps) {
          const double denom = weights[i] - alpha(i);
          if (denom > 0.0) theta = std::min(theta, weights[i] / denom);
        }
      }
      for (std::size_t i = 0; i < corral.size(); ++i) {
        weights[i] = theta * alpha(i) + (1.0 - theta) * weights[i];
      }
      // Drop the vanishing weights; always drop at least the smallest one.
      std::size_t smallest = 0;
      for (std::size_t i = 1; i < weights.size(); ++i) {
        if (weights[i] < weights[smallest]) smallest = i;
      }
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (i == smallest || weights[i] <= kWeightEps) continue;
        keep_idx.push_back(corral[i]);
        keep_w.push_back(weights[i]);
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(corral[smallest]);
        keep_w.push_back(1.0);
      }
      double total = 0.0;
      for (double w : keep_w) total += w;
      for (double& w : keep_w) w /= total;
      corral = std::move(keep_idx);
      weights = std::move(keep_w);
    }
    x.setZero();
    for (std::size_t i = 0; i < corral.size(); ++i) x += weights[i] * pts.col(corral[i]);
  }

  Vector out(m);
  for (std::size_t r = 0; r < m; ++r) out[r] = p[r] + x(r);
  return out;
}

// Appends every composition of `total` into `parts` nonnegative integers in
// lexicographic order.
void compositions(std::size_t parts, int total, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == parts) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    current.push_back(v);
    compositions(parts, total - v, current, out);
    current.pop_back();
  }
}

std::vector<Vector> unique_in_order(std::vector<Vector> pts) {
  std::vector<Vector> out;
  std::set<Vector> seen;
  for (auto& p : pts) {
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

OmegaSet OmegaSet::box(Vector lower, Vector upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw DimensionError("box bounds must be nonempty and of equal length");
  }
  check_finite(lower, "box lower");
  check_finite(upper, "box upper");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw PreconditionError("box lower bound exceeds upper bound");
  }
  const std::size_t m = lower.size();
  return OmegaSet(Box{std::move(lower), std::move(upper)}, m);
}

OmegaSet OmegaSet::ball(Vector center, double radius) {
  if (center.empty()) throw DimensionError("ball center must be nonempty");
  check_finite(center, "ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw PreconditionError("ball radius must be finite and nonnegative");
  }
  const std::size_t m = center.size();
  return OmegaSet(Ball{std::move(center), radius}, m);
}

OmegaSet OmegaSet::hull(std::vector<Vector> vertices) {
  if (vertices.empty()) throw PreconditionError("hull needs at least one vertex");
  const std::size_t m = vertices.front().size();
  if (m == 0) throw DimensionError("hull vertices must be nonempty");
  for (const auto& v : vertices) {
    if (v.size() != m) throw DimensionError("hull vertices differ in dimension");
    check_finite(v, "hull vertex");
  }
  return OmegaSet(Hull{std::move(vertices)}, m);
}

Vector OmegaSet::center() const {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vector c(dim_);
          for (std::size_t i = 0; i < dim_; ++i) c[i] = 0.5 * (s.lower[i] + s.upper[i]);
          return c;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.center;
        } else {
          Vector c(dim_, 0.0);
          for (const auto& v : s.vertices) {
            for (std::size_t i = 0; i < dim_; ++i) c[i] += v[i];
          }
          for (double& x : c) x /= static_cast<double>(s.vertices.size());
          return c;
        }
      },
      shape_);
}

double OmegaSet::radius_about_center() const {
  const Vector c = center();
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double sum = 0.0;
          for (std::size_t i = 0; i < dim_; ++i) {
            const double half = 0.5 * (s.upper[i] - s.lower[i]);
            sum += half * half;
          }
          return std::sqrt(sum);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius;
        } else {
          double r = 0.0;
          for (const auto& v : s.vertices) r = std::max(r, distance(v, c));
          return r;
        }
      },
      shape_);
}

bool omega_contains(const OmegaSet& omega, std::span<const double> p, double tol) {
  check_dim(omega, p.size(), "omega_contains");
  if (tol < 0.0) throw PreconditionError("omega_contains: tol must be nonnegative");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double sum = 0.0;
          for (std::size_t i = 0; i < p.size(); ++i) {
            double excess = 0.0;
            if (p[i] < s.lower[i]) excess = s.lower[i] - p[i];
            if (p[i] > s.upper[i]) excess = p[i] - s.upper[i];
            sum += excess * excess;
          }
          return std::sqrt(sum) <= tol;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return distance(p, s.center) - s.radius <= tol;
        } else {
          return distance(p, project_hull(s, p)) <= tol;
        }
      },
      omega.shape());
}

Vector omega_project(const OmegaSet& omega, std::span<const double> p) {
  check_dim(omega, p.size(), "omega_project");
  check_finite(p, "omega_project");
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vector q(p.begin(), p.end());
          for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::clamp(q[i], s.lower[i], s.upper[i]);
          return q;
        } else if constexpr (std::is_same_v<T, Ball>) {
          const double d = distance(p, s.center);
          if (d <= s.radius) return Vector(p.begin(), p.end());
          Vector q(p.size());
          const double f = s.radius / d;
          for (std::size_t i = 0; i < q.size(); ++i) q[i] = s.center[i] + f * (p[i] - s.center[i]);
          return q;
        } else {
          return project_hull(s, p);
        }
      },
      omega.shape());
}

double omega_support(const OmegaSet& omega, std::span<const double> d) {
  check_dim(omega, d.size(), "omega_support");
  const double norm = std::sqrt(dot(d, d));
  if (norm == 0.0) throw PreconditionError("omega_support: zero direction");
  if (std::fabs(norm - 1.0) > 1e-9) throw PreconditionError("omega_support: direction must be unit");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double h = 0.0;
          for (std::size_t i = 0; i < d.size(); ++i) h += std::max(s.lower[i] * d[i], s.upper[i] * d[i]);
          return h;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return dot(s.center, d) + s.radius * norm;
        } else {
          double h = -std::numeric_limits<double>::infinity();
          for (const auto& v : s.vertices) h = std::max(h, dot(v, d));
          return h;
        }
      },
      omega.shape());
}

double omega_hausdorff(const OmegaSet& a, const OmegaSet& b, std::size_t directions) {
  if (a.dim() != b.dim()) throw DimensionError("omega_hausdorff: sets differ in dimension");
  if (directions == 0) throw PreconditionError("omega_hausdorff: need at least one direction");
  double gap = 0.0;
  for (const auto& d : direction_net(a.dim(), directions)) {
    gap = std::max(gap, std::fabs(omega_support(a, d) - omega_support(b, d)));
  }
  return gap;
}

OmegaSet omega_inflate(const OmegaSet& omega, double gamma) {
  if (!(gamma >= 0.0)) throw PreconditionError("omega_inflate: gamma must be nonnegative");
  return std::visit(
      [&](const auto& s) -> OmegaSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vector lo = s.lower, hi = s.upper;
          for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] -= gamma;
            hi[i] += gamma;
          }
          return OmegaSet::box(std::move(lo), std::move(hi));
        } else if constexpr (std::is_same_v<T, Ball>) {
          return OmegaSet::ball(s.center, s.radius + gamma);
        } else {
          throw PreconditionError(
              "omega_inflate: hull inflation is unsupported; use a box or ball range");
        }
      },
      omega.shape());
}

OmegaSet omega_homothety(const OmegaSet& omega, double factor) {
  if (!(factor >= 0.0)) throw PreconditionError("omega_homothety: factor must be nonnegative");
  const Vector c = omega.center();
  auto map = [&](const Vector& v) {
    Vector w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = c[i] + factor * (v[i] - c[i]);
    return w;
  };
  return std::visit(
      [&](const auto& s) -> OmegaSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return OmegaSet::box(map(s.lower), map(s.upper));
        } else if constexpr (std::is_same_v<T, Ball>) {
          return OmegaSet::ball(s.center, factor * s.radius);
        } else {
          std::vector<Vector> verts;
          for (const auto& v : s.vertices) verts.push_back(map(v));
          return OmegaSet::hull(std::move(verts));
        }
      },
      omega.shape());
}

OmegaSet omega_shrink(const OmegaSet& omega, double delta) {
  if (!(delta >= 0.0)) throw PreconditionError("omega_shrink: delta must be nonnegative");
  const double radius = omega.radius_about_center();
  if (radius == 0.0) return omega;
  return omega_homothety(omega, std::max(0.0, 1.0 - delta / radius));
}

OmegaSet omega_scale(const OmegaSet& omega, double factor) {
  if (!(factor > 0.0)) throw PreconditionError("omega_scale: factor must be positive");
  auto scaled = [&](const Vector& v) {
    Vector w(v);
    for (double& x : w) x *= factor;
    return w;
  };
  return std::visit(
      [&](const auto& s) -> OmegaSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return OmegaSet::box(scaled(s.lower), scaled(s.upper));
        } else if constexpr (std::is_same_v<T, Ball>) {
          return OmegaSet::ball(scaled(s.center), factor * s.radius);
        } else {
          std::vector<Vector> verts;
          for (const auto& v : s.vertices) verts.push_back(scaled(v));
          return OmegaSet::hull(std::move(verts));
        }
      },
      omega.shape());
}

std::vector<Vector> omega_net(const OmegaSet& omega, int k, bool include_extreme) {
  if (k < 1) throw PreconditionError("omega_net: resolution k must be at least 1");
  const std::size_t m = omega.dim();
  return std::visit(
      [&](const auto& s) -> std::vector<Vector> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          // Per-axis samples; odometer order with the last axis fastest.
          std::vector<std::vector<double>> axes(m);
          for (std::size_t i = 0; i < m; ++i) {
            const double lo = s.lower[i], hi = s.upper[i];
            if (lo == hi) {
              axes[i] = {lo};
            } else if (include_extreme) {
              for (int j = 0; j <= k; ++j) {
                axes[i].push_back(j == k ? hi : lo + (hi - lo) * j / k);
              }
            } else {
              for (int j = 0; j < k; ++j) axes[i].push_back(lo + (hi - lo) * (j + 0.5) / k);
            }
          }
          std::vector<Vector> out;
          std::vector<std::size_t> idx(m, 0);
          for (;;) {
            Vector p(m);
            for (std::size_t i = 0; i < m; ++i) p[i] = axes[i][idx[i]];
            out.push_back(std::move(p));
            std::size_t axis = m;
            while (axis > 0) {
              --axis;
              if (++idx[axis] < axes[axis].size()) break;
              idx[axis] = 0;
              if (axis == 0) return out;
            }
            if (m == 0) return out;
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          std::vector<Vector> out{s.center};
          if (s.radius == 0.0) return out;
          std::vector<Vector> dirs;
          if (m == 2) {
            for (int j = 1; j <= k; ++j) {
              const int samples = 8 * j;
              const double rho = s.radius * j / k;
              for (int a = 0; a < samples; ++a) {
                const double ang = 2.0 * std::numbers::pi * a / samples;
                out.push_back({s.center[0] + rho * std::cos(ang), s.center[1] + rho * std::sin(ang)});
              }
            }
            return out;
          }
          dirs = direction_net(m, m == 1 ? 2 : 2 * m * static_cast<std::size_t>(k + 1));
          for (int j = 1; j <= k; ++j) {
            const double rho = s.radius * j / k;
            for (const auto& d : dirs) {
              Vector p(m);
              for (std::size_t i = 0; i < m; ++i) p[i] = s.center[i] + rho * d[i];
              out.push_back(std::move(p));
            }
          }
          return out;
        } else {
          const std::size_t count = s.vertices.size();
          std::vector<std::vector<int>> weights;
          std::vector<int> scratch;
          compositions(count, k, scratch, weights);
          std::vector<Vector> out;
          if (include_extreme) out = s.vertices;
          for (const auto& w : weights) {
            const bool pure = std::count(w.begin(), w.end(), 0) + 1 == static_cast<long>(count);
            if (pure) continue;
            Vector p(m, 0.0);
            for (std::size_t v = 0; v < count; ++v) {
              if (w[v] == 0) continue;
              const double lam = static_cast<double>(w[v]) / k;
              for (std::size_t i = 0; i < m; ++i) p[i] += lam * s.vertices[v][i];
            }
            out.push_back(std::move(p));
          }
          if (out.empty()) out.push_back(omega.center());
          return unique_in_order(std::move(out));
        }
      },
      omega.shape());
}

double omega_net_mesh(const OmegaSet& omega, int k) {
  if (k < 1) throw PreconditionError("omega_net_mesh: resolution k must be at least 1");
  const std::size_t m = omega.dim();
  if (const auto* box = std::get_if<Box>(&omega.shape())) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double half = 0.5 * (box->upper[i] - box->lower[i]) / k;
      sum += half * half;
    }
    return std::sqrt(sum);
  }
  if (const auto* ball = std::get_if<Ball>(&omega.shape()); ball && m <= 2) {
    const double radial = 0.5 * ball->radius / k;
    if (m == 1) return radial;
    const double angular = std::numbers::pi * ball->radius / (8.0 * k);
    return std::sqrt(radial * radial + angular * angular);
  }
  // Empirical estimate: seeded samples of the set against the net.
  const auto net = omega_net(omega, k, true);
  std::mt19937_64 rng(kDirectionSeed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const Vector c = omega.center();
  const double radius = omega.radius_about_center();
  double worst = 0.0;
  for (int trial = 0; trial < 4096; ++trial) {
    Vector p(m);
    if (const auto* hull = std::get_if<Hull>(&omega.shape())) {
      std::vector<double> w(hull->vertices.size());
      double total = 0.0;
      for (double& x : w) total += (x = -std::log(1.0 - unit(rng)));
      std::fill(p.begin(), p.end(), 0.0);
      for (std::size_t v = 0; v < w.size(); ++v) {
        for (std::size_t i = 0; i < m; ++i) p[i] += w[v] / total * hull->vertices[v][i];
      }
    } else {
      double norm = 0.0;
      for (double& x : p) {
        x = normal(rng);
        norm += x * x;
      }
      norm = std::sqrt(norm);
      const double rho = radius * std::pow(unit(rng), 1.0 / static_cast<double>(m));
      for (std::size_t i = 0; i < m; ++i) p[i] = c[i] + rho * p[i] / norm;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : net) best = std::min(best, distance(p, q));
    worst = std::max(worst, best);
  }
  return worst;
}

PiecewiseConstantControl transport_control(const PiecewiseConstantControl& u,
                                           const OmegaSet& target) {
  std::vector<Vector> values;
  values.reserve(u.pieces());
  for (const auto& v : u.values()) values.push_back(omega_project(target, v));
  return PiecewiseConstantControl(u.breakpoints(), std::move(values),
                                  omega_project(target, u.extension()));
}

std::vector<Vector> direction_net(std::size_t m, std::size_t count, std::uint64_t seed) {
  if (m == 0) throw DimensionError("direction_net: dimension must be positive");
  std::vector<Vector> out;
  if (m == 1) return {{1.0}, {-1.0}};
  if (count == 0) return out;
  if (m == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      out.push_back({std::cos(ang), std::sin(ang)});
    }
    return out;
  }
  if (m == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = count == 1 ? 1.0 : 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ang = golden * static_cast<double>(i);
      out.push_back({rho * std::cos(ang), rho * std::sin(ang), z});
    }
    return out;
  }
  for (std::size_t i = 0; i < m && out.size() < count; ++i) {
    Vector e(m, 0.0);
    e[i] = 1.0;
    out.push_back(e);
    if (out.size() < count) {
      e[i] = -1.0;
      out.push_back(e);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  while (out.size() < count) {
    Vector d(m);
    double norm = 0.0;
    for (double& x : d) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& x : d) x /= norm;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace reachlab
