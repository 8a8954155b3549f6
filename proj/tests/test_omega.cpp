#include <cmath>
#include <random>

#include "doctest.h"
#include "reachlab/omega.hpp"

using namespace reachlab;

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Dense sampling of a segment or triangle, the oracle for hull queries.
double dense_hull_distance(const std::vector<Vector>& v, const Vector& p) {
  double best = INFINITY;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= (v.size() > 2 ? n - i : 0); ++j) {
      const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
      Vector q(p.size());
      for (std::size_t d = 0; d < p.size(); ++d) {
        q[d] = v.size() > 2 ? (1 - a - b) * v[0][d] + a * v[1][d] + b * v[2][d] : (1 - a) * v[0][d] + a * v[1][d];
      }
      best = std::min(best, dist(p, q));
    }
  }
  return best;
}

std::vector<OmegaSet> sample_sets(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> unif(-2.0, 2.0), pos(0.0, 1.5);
  std::vector<OmegaSet> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 3) {
      case 0: {
        const double a = unif(rng), b = unif(rng);
        out.push_back(OmegaSet::box({a, b}, {a + pos(rng), b + pos(rng)}));
        break;
      }
      case 1: out.push_back(OmegaSet::ball({unif(rng), unif(rng)}, pos(rng))); break;
      default:
        out.push_back(OmegaSet::hull({{unif(rng), unif(rng)}, {unif(rng), unif(rng)}, {unif(rng), unif(rng)}}));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("omega") {
  TEST_CASE("contains examples") {
    CHECK(omega_contains(OmegaSet::box({-1}, {1}), std::vector<double>{0.5}, 0.0));
    CHECK_FALSE(omega_contains(OmegaSet::ball({0, 0}, 1), std::vector<double>{1, 1}, 0.0));
    CHECK(omega_contains(OmegaSet::hull({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{0.25, 0.25}, 1e-9));
    CHECK_FALSE(omega_contains(OmegaSet::hull({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{0.6, 0.6}, 1e-9));
    CHECK_THROWS_AS(omega_contains(OmegaSet::box({-1}, {1}), std::vector<double>{0, 0}, 0.0), DimensionError);
  }

  TEST_CASE("generators are members") {
    const auto box = OmegaSet::box({-1, 0}, {1, 2});
    for (const Vector& c : {Vector{-1, 0}, Vector{1, 0}, Vector{-1, 2}, Vector{1, 2}}) CHECK(omega_contains(box, c, 0.0));
    const auto ball = OmegaSet::ball({1, 2}, 0.5);
    CHECK(omega_contains(ball, std::vector<double>{1, 2}, 0.0));
    const std::vector<Vector> verts{{0, 0}, {3, 1}, {1, 4}, {2, 2}};
    const auto hull = OmegaSet::hull(verts);
    for (const auto& v : verts) CHECK(omega_contains(hull, v, 1e-12));
  }

  TEST_CASE("projection examples") {
    CHECK(omega_project(OmegaSet::box({-1}, {1}), std::vector<double>{3})[0] == 1.0);
    const Vector b = omega_project(OmegaSet::ball({0, 0}, 2), std::vector<double>{6, 8});
    CHECK(b[0] == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(1.6).epsilon(1e-15));
    const Vector h = omega_project(OmegaSet::hull({{0, 0}, {2, 0}}), std::vector<double>{1, 5});
    CHECK(std::fabs(h[0] - 1.0) <= 1e-10);
    CHECK(std::fabs(h[1]) <= 1e-10);
  }

  TEST_CASE("hull projection agrees with dense sampling") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
      std::vector<Vector> v{{unif(rng), unif(rng)}, {unif(rng), unif(rng)}, {unif(rng), unif(rng)}};
      const Vector p{unif(rng), unif(rng)};
      const Vector q = omega_project(OmegaSet::hull(v), p);
      const double oracle = dense_hull_distance(v, p);
      // The oracle samples the triangle on a 1/400 lattice.
      CHECK(dist(p, q) <= oracle + 1e-10);
      CHECK(dist(p, q) >= oracle - 0.02);
    }
  }

  TEST_CASE("projection idempotence and optimality") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (const auto& omega : sample_sets(rng, 12)) {
      const auto net = omega_net(omega, 8);
      for (int i = 0; i < 1000 / 12 + 1; ++i) {
        const Vector p{unif(rng), unif(rng)};
        const Vector q = omega_project(omega, p);
        const Vector qq = omega_project(omega, q);
        CHECK(dist(q, qq) <= 1e-10);
        const Vector& r = net[std::uniform_int_distribution<std::size_t>(0, net.size() - 1)(rng)];
        CHECK(dist(p, q) <= dist(p, r) + 1e-9);
      }
    }
  }

  TEST_CASE("support function examples and homogeneity") {
    CHECK(omega_support(OmegaSet::box({-1, -1}, {1, 1}), std::vector<double>{1, 0}) == 1.0);
    CHECK(omega_support(OmegaSet::ball({1, 0}, 2), std::vector<double>{0, 1}) == 2.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(omega_support(OmegaSet::hull({{0, 0}, {1, 0}, {0, 1}}), std::vector<double>{s, s}) ==
          doctest::Approx(s).epsilon(1e-15));
    CHECK_THROWS_AS(omega_support(OmegaSet::box({-1}, {1}), std::vector<double>{0}), PreconditionError);
    CHECK_THROWS_AS(omega_support(OmegaSet::box({-1}, {1}), std::vector<double>{2}), PreconditionError);

    // h(lambda d) = lambda h(d): compare the analytic values at lambda·d with
    // the normalized evaluation.
    const auto box = OmegaSet::box({-1, -2}, {3, 1});
    const auto ball = OmegaSet::ball({0.5, -1}, 1.5);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 100; ++i) {
      const double lambda = 0.1 + 5.0 * std::fabs(normal(rng));
      Vector d{normal(rng), normal(rng)};
      const double n = std::hypot(d[0], d[1]);
      d[0] /= n;
      d[1] /= n;
      const double box_analytic = std::max(-1 * lambda * d[0], 3 * lambda * d[0]) + std::max(-2 * lambda * d[1], 1 * lambda * d[1]);
      CHECK(lambda * omega_support(box, d) == doctest::Approx(box_analytic).epsilon(1e-12));
      const double ball_analytic = 0.5 * lambda * d[0] - lambda * d[1] + 1.5 * lambda;
      CHECK(lambda * omega_support(ball, d) == doctest::Approx(ball_analytic).epsilon(1e-12));
    }
  }

  TEST_CASE("hausdorff examples") {
    CHECK(omega_hausdorff(OmegaSet::box({-1}, {1}), OmegaSet::box({-2}, {2})) == 1.0);
    const double sq = omega_hausdorff(OmegaSet::box({-1, -1}, {1, 1}), OmegaSet::box({-2, -2}, {2, 2}));
    CHECK(sq <= std::sqrt(2.0) + 1e-12);
    CHECK(sq >= std::sqrt(2.0) - 1e-3);
    const auto ball = OmegaSet::ball({0.3, 0.1}, 0.7);
    CHECK(omega_hausdorff(ball, ball) == 0.0);
    CHECK(omega_hausdorff(OmegaSet::ball({0, 0}, 1), OmegaSet::ball({3, 4}, 1)) ==
          doctest::Approx(5.0).epsilon(1e-6));
  }

  TEST_CASE("direction-net underestimate against a fine brute-force grid") {
    // In 2D the true d_H is the sup over all angles; a 200000-angle grid
    // stands in for the supremum.
    std::mt19937_64 rng(17);
    const auto sets = sample_sets(rng, 18);
    for (std::size_t i = 0; i + 1 < sets.size(); i += 2) {
      double brute = 0.0;
      for (int j = 0; j < 200000; ++j) {
        const double a = 2 * M_PI * j / 200000.0;
        const Vector d{std::cos(a), std::sin(a)};
        brute = std::max(brute, std::fabs(omega_support(sets[i], d) - omega_support(sets[i + 1], d)));
      }
      const double net = omega_hausdorff(sets[i], sets[i + 1]);
      CHECK(net <= brute + 1e-12);
      CHECK(net >= brute - 1e-3);
    }
  }

  TEST_CASE("hausdorff axioms on random pairs") {
    std::mt19937_64 rng(23);
    const auto sets = sample_sets(rng, 30);
    for (std::size_t i = 0; i + 2 < sets.size(); ++i) {
      const auto &a = sets[i], &b = sets[i + 1], &c = sets[i + 2];
      CHECK(std::fabs(omega_hausdorff(a, b) - omega_hausdorff(b, a)) <= 1e-12);
      CHECK(omega_hausdorff(a, a) == 0.0);
      CHECK(omega_hausdorff(a, c) <= omega_hausdorff(a, b) + omega_hausdorff(b, c) + 1e-9);
    }
    CHECK_THROWS_AS(omega_hausdorff(OmegaSet::box({-1}, {1}), OmegaSet::ball({0, 0}, 1)), DimensionError);
  }

  TEST_CASE("inflation") {
    const auto box = OmegaSet::box({-1}, {1});
    CHECK(omega_inflate(box, 0.5) == OmegaSet::box({-1.5}, {1.5}));
    CHECK(omega_inflate(OmegaSet::ball({1, 1}, 2), 0.5) == OmegaSet::ball({1, 1}, 2.5));
    CHECK(omega_inflate(box, 0.0) == box);
    CHECK_THROWS_AS(omega_inflate(OmegaSet::hull({{0.0}, {1.0}}), 0.1), PreconditionError);
    CHECK_THROWS_AS(omega_inflate(box, -0.1), PreconditionError);
    // Box inflation over-approximates N_gamma by at most gamma (sqrt(m) - 1).
    const auto sq = OmegaSet::box({-1, -1}, {1, 1});
    CHECK(omega_hausdorff(sq, omega_inflate(sq, 0.1)) <= 0.1 * std::sqrt(2.0) + 1e-12);
  }

  TEST_CASE("homothety and shrink") {
    const auto box = OmegaSet::box({0, 0}, {2, 4});
    CHECK(omega_homothety(box, 0.5) == OmegaSet::box({0.5, 1}, {1.5, 3}));
    const auto shrunk = omega_shrink(OmegaSet::ball({0, 0}, 1), 0.25);
    CHECK(shrunk == OmegaSet::ball({0, 0}, 0.75));
    const auto tri = OmegaSet::hull({{0, 0}, {3, 0}, {0, 3}});
    for (double delta : {0.1, 0.5, 1.0}) CHECK(omega_hausdorff(tri, omega_shrink(tri, delta)) <= delta + 1e-12);
    CHECK(omega_scale(box, 2.0) == OmegaSet::box({0, 0}, {4, 8}));
  }

  TEST_CASE("net examples") {
    const auto box_net = omega_net(OmegaSet::box({-1}, {1}), 2, true);
    CHECK(box_net == std::vector<Vector>{{-1}, {0}, {1}});
    const auto ball_net = omega_net(OmegaSet::ball({0, 0}, 1), 1);
    CHECK(ball_net.front() == Vector{0, 0});
    bool on_circle = false;
    for (const auto& p : ball_net) on_circle = on_circle || std::fabs(std::hypot(p[0], p[1]) - 1.0) < 1e-12;
    CHECK(on_circle);
    CHECK(omega_net(OmegaSet::box({-1, 0}, {1, 0}), 3).size() == 4);
  }

  TEST_CASE("net points are members and extremes appear") {
    std::mt19937_64 rng(29);
    auto sets = sample_sets(rng, 9);
    sets.push_back(OmegaSet::ball({0, 0, 0}, 1));
    sets.push_back(OmegaSet::ball({1.0}, 0.5));
    sets.push_back(OmegaSet::box({-1, -1, -1, -1}, {1, 1, 1, 1}));
    for (const auto& omega : sets) {
      for (int k : {1, 2, 5}) {
        for (bool extreme : {true, false}) {
          for (const auto& p : omega_net(omega, k, extreme)) CHECK(omega_contains(omega, p, 1e-9));
        }
      }
    }
    const std::vector<Vector> verts{{0, 0}, {1, 0}, {0, 1}};
    const auto hull_net = omega_net(OmegaSet::hull(verts), 3, true);
    for (const auto& v : verts) CHECK(std::find(hull_net.begin(), hull_net.end(), v) != hull_net.end());
    const auto box_net = omega_net(OmegaSet::box({-1, -2}, {1, 2}), 3, true);
    for (const Vector& c : {Vector{-1, -2}, Vector{-1, 2}, Vector{1, -2}, Vector{1, 2}}) {
      CHECK(std::find(box_net.begin(), box_net.end(), c) != box_net.end());
    }
  }

  TEST_CASE("net mesh bounds the covering radius") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& omega : {OmegaSet::box({-1, -1}, {1, 1}), OmegaSet::ball({0, 0}, 1)}) {
      for (int k : {1, 2, 4}) {
        const auto net = omega_net(omega, k);
        const double mesh = omega_net_mesh(omega, k);
        for (int i = 0; i < 500; ++i) {
          const Vector p = omega_project(omega, std::vector<double>{4 * unif(rng) - 2, 4 * unif(rng) - 2});
          double best = INFINITY;
          for (const auto& q : net) best = std::min(best, dist(p, q));
          CHECK(best <= mesh + 1e-12);
        }
      }
    }
  }

  TEST_CASE("transport") {
    const auto omega = OmegaSet::box({-1}, {1});
    const PiecewiseConstantControl u({0, 0.5, 1}, {{0.2}, {-0.7}}, {0.0});
    CHECK(transport_control(u, omega) == u);
    const PiecewiseConstantControl wide({0, 0.5, 1}, {{-2}, {2}}, {3});
    const auto moved = transport_control(wide, omega);
    CHECK(moved.values() == std::vector<Vector>{{-1}, {1}});
    CHECK(moved.extension() == Vector{1});
    CHECK(moved.breakpoints() == wide.breakpoints());

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const auto square = OmegaSet::box({-1, -1}, {1, 1});
    for (int i = 0; i < 50; ++i) {
      const PiecewiseConstantControl r({0, 1, 2, 3}, {{unif(rng), unif(rng)}, {unif(rng), unif(rng)}, {unif(rng), unif(rng)}},
                                       {0, 0});
      CHECK(transport_control(r, omega_inflate(square, 0.3)) == r);
      // Contraction: moving into a shrunken range displaces each value by at
      // most the distance between the ranges.
      const auto inner = omega_shrink(square, 0.4);
      const auto t = transport_control(r, inner);
      const double d = omega_hausdorff(square, inner);
      for (std::size_t p = 0; p < r.pieces(); ++p) CHECK(dist(r.values()[p], t.values()[p]) <= d + 1e-3);
    }
  }

  TEST_CASE("degenerate ranges") {
    const auto point = OmegaSet::box({0.5, 0.5}, {0.5, 0.5});
    CHECK(omega_net(point, 4).size() == 1);
    const auto dot = OmegaSet::ball({1, 2}, 0.0);
    CHECK(omega_project(dot, std::vector<double>{5, 5}) == Vector{1, 2});
    const auto single = OmegaSet::hull({{2, 3}});
    CHECK(omega_project(single, std::vector<double>{0, 0}) == Vector{2, 3});
    CHECK(omega_hausdorff(point, dot) == doctest::Approx(std::hypot(0.5, 1.5)).epsilon(1e-6));
  }

  TEST_CASE("invalid ranges") {
    CHECK_THROWS(OmegaSet::box({1}, {-1}));
    CHECK_THROWS(OmegaSet::ball({0}, -1));
    CHECK_THROWS(OmegaSet::hull({}));
    CHECK_THROWS(OmegaSet::hull({{0, 0}, {1}}));
  }
}
