#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace lgo;
using namespace lgo::testing;

namespace {

// Nearest grid point of a 1-d box section to the projected point.
Vector brute_gamma_1d(const Vector& x, const Subspace& axis, double lo, double hi, double step) {
  const Vector dir = axis.basis().col(0);
  const Vector px = axis.project(x);
  double best = 1e300;
  Vector arg;
  for (double t = lo; t <= hi + 1e-12; t += step) {
    const double d = (dir * t - px).norm();
    if (d < best) {
      best = d;
      arg = dir * t;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("projection onto coordinate subspaces") {
  CHECK(project(vec({1, 1}), Subspace::axis(2, 0)).isApprox(vec({1, 0})));
  CHECK(project(vec({0, 1}), Subspace::axis(2, 0)).norm() == doctest::Approx(0.0));
  CHECK(project(vec({3, 4, 5}), Subspace::coordinate(3, {0, 1})).isApprox(vec({3, 4, 0})));
}

TEST_CASE("projection: idempotent, contractive, best approximation") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
    std::vector<Vector> span;
    for (std::size_t k = 0; k < 1 + static_cast<std::size_t>(trial) % (n - 1); ++k) {
      Vector v(static_cast<Eigen::Index>(n));
      for (auto& c : v) c = g(rng);
      span.push_back(v);
    }
    const Subspace s = Subspace::from_vectors(n, span);
    Vector x(static_cast<Eigen::Index>(n));
    for (auto& c : x) c = g(rng);
    const Vector p = s.project(x);
    CHECK((s.project(p) - p).norm() <= 1e-12);
    CHECK(p.norm() <= x.norm() + 1e-12);
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(s.dim()));
    for (auto& c : coeffs) c = g(rng);
    const Vector y = s.basis() * coeffs;
    CHECK((x - p).norm() <= (x - y).norm() + 1e-9);
  }
}

TEST_CASE("orthonormal basis") {
  const Subspace s = Subspace::from_vectors(3, {vec({1, 1, 0}), vec({0, 1, 1})});
  const Eigen::MatrixXd gram = s.basis().transpose() * s.basis();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gamma on a box of the x-axis matches brute force") {
  const Subspace ax = Subspace::axis(2, 0);
  const FeasibleSet f(ax, Box{vec({0}), vec({1})});
  for (const Vector& x : {vec({2, 5}), vec({0.5, 7}), vec({0, 1}), vec({-3, 2}), vec({0.25, -1})}) {
    const auto g = gamma(x, f);
    REQUIRE(g.size() == 1);
    CHECK((g[0] - brute_gamma_1d(x, ax, 0, 1, 1e-3)).norm() <= 1e-3);
  }
  CHECK(gamma(vec({2, 5}), f)[0].isApprox(vec({1, 0})));
  CHECK((gamma(vec({0.5, 7}), f)[0] - vec({0.5, 0})).norm() <= 1e-12);
  // The projection (0,0) is already feasible.
  CHECK(gamma(vec({0, 1}), f)[0].norm() <= 1e-12);
}

TEST_CASE("gamma on a polytope and a ball matches brute force") {
  Eigen::MatrixXd a(3, 2);
  a << 1, 1, -1, 0, 0, -1;
  const FeasibleSet tri(Subspace::full(2), Polytope{a, vec({1, 0, 0})});
  const FeasibleSet disc(Subspace::full(2), Ball{vec({0, 0}), 1.0});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = vec({u(rng), u(rng)});
    for (const FeasibleSet* f : {&tri, &disc}) {
      double best = 1e300;
      Vector arg;
      for (double s = -1; s <= 1 + 1e-12; s += 2e-3)
        for (double t = -1; t <= 1 + 1e-12; t += 2e-3) {
          const Vector y = vec({s, t});
          if (!f->contains(y, 1e-12)) continue;
          if ((y - x).norm() < best) {
            best = (y - x).norm();
            arg = y;
          }
        }
      const auto g = gamma(x, *f);
      REQUIRE(g.size() == 1);
      // The grid argmin slides along the boundary, so compare distances:
      // gamma must be feasible, no farther than any grid point, and close to the best.
      CHECK(f->contains(g[0], 1e-9));
      const double d = (g[0] - x).norm();
      CHECK(d <= best + 1e-9);
      CHECK(best - d <= 3e-3);
    }
  }
}

TEST_CASE("gamma is the projection when it is feasible") {
  const FeasibleSet f(Subspace::coordinate(3, {0, 1}), Box{vec({-1, -1}), vec({1, 1})});
  const Vector x = vec({0.3, -0.4, 9});
  CHECK((gamma(x, f)[0] - f.carrier().project(x)).norm() <= 1e-12);
}

TEST_CASE("subspace intersections") {
  CHECK(intersect_subspaces({Subspace::axis(2, 0), Subspace::axis(2, 1)}).dim() == 0);
  CHECK(intersect_subspaces({Subspace::full(2), Subspace::axis(2, 0)}).same_as(Subspace::axis(2, 0)));
  const Subspace s = intersect_subspaces({Subspace::coordinate(3, {0, 1}), Subspace::coordinate(3, {1, 2})});
  CHECK(s.dim() == 1);
  CHECK(s.same_as(Subspace::axis(3, 1)));
  // A tilted pair: span{(1,1,0),(0,0,1)} and span{(1,0,0),(0,1,1)} meet in span{(1,1,1)}.
  const Subspace t = intersect_subspaces({Subspace::from_vectors(3, {vec({1, 1, 0}), vec({0, 0, 1})}),
                                          Subspace::from_vectors(3, {vec({1, 0, 0}), vec({0, 1, 1})})});
  CHECK(t.dim() == 1);
  CHECK(t.contains(vec({1, 1, 1})));
}

TEST_CASE("affine intersections") {
  // x = 1/2 and y = 1.
  const AffineSet vertical{vec({0.5, 0}), Subspace::axis(2, 1)};
  const AffineSet horizontal{vec({0, 1}), Subspace::axis(2, 0)};
  const auto r = intersect_affine({vertical, horizontal});
  CHECK(r.status == AffineStatus::point);
  CHECK((r.set.point - vec({0.5, 1})).norm() <= 1e-15);
  CHECK(r.residual <= 1e-12);

  const auto whole = intersect_affine({AffineSet{vec({0, 0}), Subspace::full(2)}});
  CHECK(whole.status == AffineStatus::affine);
  CHECK(whole.set.directions.dim() == 2);

  const auto none = intersect_affine({AffineSet{vec({0, 0}), Subspace::axis(2, 0)},
                                      AffineSet{vec({0, 1}), Subspace::axis(2, 0)}});
  CHECK(none.status == AffineStatus::empty);
  CHECK(none.residual > 0.1);
}

TEST_CASE("preimage intersection contains every consistent point") {
  // Points x with project(x, L^k) = x^k for both axes: only (a, b) itself.
  const Vector target = vec({0.3, -0.7});
  std::vector<AffineSet> pre;
  for (std::size_t k = 0; k < 2; ++k) {
    const Subspace s = Subspace::axis(2, k);
    pre.push_back(AffineSet{s.project(target), s.complement()});
  }
  const auto r = intersect_affine(pre);
  CHECK(r.set.contains(target));
}

TEST_CASE("feasible set validation") {
  CHECK_THROWS_AS(FeasibleSet(Subspace::axis(2, 0), Polytope{Eigen::MatrixXd::Constant(1, 1, -1.0), vec({0})}),
                  ValidationError);
  CHECK_THROWS_AS(FeasibleSet(Subspace::axis(2, 0), Box{vec({1}), vec({0})}), ValidationError);
  CHECK_THROWS_AS(FeasibleSet(Subspace::axis(2, 0), Ball{vec({0}), -1.0}), ValidationError);
  Eigen::MatrixXd a(2, 1);
  a << 1, -1;
  CHECK_THROWS_AS(FeasibleSet(Subspace::axis(2, 0), Polytope{a, vec({0, -1})}), ValidationError);
}
