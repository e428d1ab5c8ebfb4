#include "support.hpp"

#include <doctest.h>

using namespace lgo;
using namespace lgo::testing;

TEST_CASE("two axes glue to (1/2, 1)") {
  const auto ps = two_axes_problems();
  const GlueResult g = glue(ps);
  CHECK(g.status == GlueStatus::exact_point);
  CHECK(g.point == vec({0.5, 1}));
  CHECK(g.residual <= 1e-12);
  CHECK(g.informative == "solutions_span");
  for (double d : glue_quality(g.point, ps)) CHECK(d == 0.0);
  CHECK(to_json(g)["status"] == "exact_point");
}

TEST_CASE("a single full-space problem glues to its solution") {
  const auto p = solved(box_problem("sq", Subspace::full(2), vec({0, 0}), vec({1, 1}), two_axes_utility()));
  const GlueResult g = glue({p});
  CHECK(g.status == GlueStatus::exact_point);
  CHECK((g.point - p.solutions()[0]).norm() <= 1e-12);
}

TEST_CASE("separable quadratic on the three axes of R^3") {
  // U = -(x-1)^2 - (y+2)^2 - (z-1/2)^2 expanded; maximizer (1, -2, 1/2).
  const QPoly u = qpoly(3, {{{2, 0, 0}, -1}, {{1, 0, 0}, 2}, {{0, 2, 0}, -1}, {{0, 1, 0}, -4},
                            {{0, 0, 2}, -1}, {{0, 0, 1}, 1}, {{0, 0, 0}, ratio(-21, 4)}});
  std::vector<LocalProblem> ps;
  for (std::size_t k = 0; k < 3; ++k)
    ps.push_back(solved(box_problem("axis" + std::to_string(k), Subspace::axis(3, k), vec({-3}), vec({3}), u)));
  const GlueResult g = glue(ps);
  CHECK(g.status == GlueStatus::exact_point);
  CHECK((g.point - vec({1, -2, 0.5})).norm() <= 1e-12);
  // Brute force on a grid.
  double best = -1e300;
  Vector arg;
  for (double x = -3; x <= 3; x += 0.5)
    for (double y = -3; y <= 3; y += 0.5)
      for (double z = -3; z <= 3; z += 0.5)
        if (const double v = eval(u, vec({x, y, z})); v > best) {
          best = v;
          arg = vec({x, y, z});
        }
  CHECK((arg - g.point).norm() <= 1e-12);
}

TEST_CASE("rank-deficient families are underdetermined") {
  const auto p = two_axes_problems()[0];
  const GlueResult g = glue({p, p});
  CHECK(g.status == GlueStatus::underdetermined);
  CHECK(g.directions.dim() == 1);
  CHECK(g.informative == "none");
  const auto d = glue_quality(g.point, {p, p});
  CHECK(d.size() == 2);
  CHECK(d[0] <= 1e-12);
}

TEST_CASE("inconsistent overdetermined constraints") {
  // Two problems on the x-axis with different maximizers, plus the y-axis.
  const LocalProblem a = solved(box_problem("a", Subspace::axis(2, 0), vec({0}), vec({1}),
                                            qpoly(2, {{{2, 0}, -1}, {{1, 0}, 1}})));
  const LocalProblem b = solved(box_problem("b", Subspace::axis(2, 0), vec({0}), vec({1}),
                                            qpoly(2, {{{2, 0}, -1}, {{1, 0}, ratio(3, 2)}})));
  const LocalProblem c = two_axes_problems()[1];
  const GlueResult g = glue({a, b, c});
  CHECK(g.status == GlueStatus::inconsistent);
  CHECK(g.residual > 1e-3);
  CHECK(g.point(0) == doctest::Approx(0.625));
  const auto d = glue_quality(g.point, {a, b, c});
  CHECK(d[0] > 0.1);
}

TEST_CASE("consistent redundant constraints") {
  const auto ps = two_axes_problems();
  const auto full = solved(box_problem("sq", Subspace::full(2), vec({0, 0}), vec({1, 1}), two_axes_utility()));
  const GlueResult g = glue({ps[0], ps[1], full});
  CHECK(g.status == GlueStatus::overdetermined_consistent);
  CHECK((g.point - vec({0.5, 1})).norm() <= 1e-12);
}

TEST_CASE("zero solutions pass by the constraint rank test") {
  const QPoly u = qpoly(2, {{{2, 0}, -1}, {{0, 2}, -1}});
  const LocalProblem a = solved(box_problem("a", Subspace::axis(2, 0), vec({-1}), vec({1}), u));
  const LocalProblem b = solved(box_problem("b", Subspace::axis(2, 1), vec({-1}), vec({1}), u));
  const GlueResult g = glue({a, b});
  CHECK(g.status == GlueStatus::exact_point);
  CHECK(g.informative == "constraint_rank");
  CHECK(g.point.norm() <= 1e-12);
}

TEST_CASE("separability") {
  CHECK(check_separability(two_axes_utility(), Subspace::axis(2, 0)));
  CHECK_FALSE(check_separability(qpoly(2, {{{1, 1}, 1}}), Subspace::axis(2, 0)));
  CHECK(check_separability(qpoly(2, {{{1, 1}, 1}}), Subspace::full(2)));
  // x^2 + y^2 is separable along any line; (x + y)^2 is not separable along the x-axis.
  CHECK(check_separability(qpoly(2, {{{2, 0}, 1}, {{0, 2}, 1}}), Subspace::from_vectors(2, {vec({1, 1})})));
  CHECK_FALSE(check_separability(qpoly(2, {{{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, 1}}), Subspace::axis(2, 0)));
}

TEST_CASE("random separable concave quadratics glue to the global maximizer") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
    const SeparableInstance inst = random_separable(rng, n);
    for (const auto& p : inst.problems) CHECK(check_separability(inst.utility, p.carrier()));
    const GlueResult g = glue(inst.problems);
    CHECK(g.status == GlueStatus::exact_point);
    CHECK((g.point - inst.argmax).norm() <= 1e-9);
  }
}

TEST_CASE("glue is equivariant under a rational rotation") {
  QMatrix r(2, 2);
  r(0, 0) = ratio(3, 5), r(0, 1) = ratio(-4, 5), r(1, 0) = ratio(4, 5), r(1, 1) = ratio(3, 5);
  const QPoly u = two_axes_utility();
  const QPoly ur = substitute(u, r.transpose());  // U(R^T x)
  std::vector<LocalProblem> plain, rotated;
  for (std::size_t k = 0; k < 2; ++k) {
    plain.push_back(solved(box_problem("p", Subspace::axis(2, k), vec({-2}), vec({2}), u)));
    rotated.push_back(
        solved(box_problem("r", Subspace::from_generators(r.cols_range(k, 1)), vec({-2}), vec({2}), ur)));
  }
  const Vector x = glue(plain).point;
  const Vector y = glue(rotated).point;
  CHECK((r.to_double() * x - y).norm() <= 1e-9);
  // Order of problems does not matter.
  CHECK((glue({rotated[1], rotated[0]}).point - y).norm() <= 1e-12);
}

TEST_CASE("gluing needs single solutions") {
  const QPoly w = qpoly(2, {{{4, 0}, -1}, {{2, 0}, 2}});
  const LocalProblem p = solved(box_problem("w", Subspace::axis(2, 0), vec({-2}), vec({2}), w));
  REQUIRE(p.solutions().size() == 2);
  CHECK_THROWS_AS(glue({p}), ValidationError);
}

TEST_CASE("restrictions of a global utility") {
  CHECK(restrictions_of(two_axes_utility(), two_axes_problems()));
  CHECK_FALSE(restrictions_of(qpoly(2, {{{1, 0}, 1}}), two_axes_problems()));
}
