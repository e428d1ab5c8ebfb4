#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace lgo;
using namespace lgo::testing;

namespace {

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Argmax of a piece along a segment t * dir, t in [lo, hi], by dense scan.
double scan_argmax(const RPoly& p, const Vector& dir, double lo, double hi) {
  double best = -1e300, arg = lo;
  for (int i = 0; i <= 100000; ++i) {
    const double t = lo + (hi - lo) * i / 100000.0;
    if (const double v = eval(p, Vector(dir * t)); v > best) {
      best = v;
      arg = t;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("degree law") {
  const auto ex2 = two_axes_problems();
  CHECK(choose_degree(ex2, build_partition(carriers(ex2))) == 2);

  const std::vector<LocalProblem> single = {ex2[0]};
  CHECK(choose_degree(single, build_partition(carriers(single))) == 2);

  const auto two = two_maxima_instance();
  const Partition p2 = build_partition(carriers(two));
  const auto hosted2 = hosted_maxima(two, p2);
  CHECK(hosted2.size() == 2);
  CHECK(choose_degree(two, p2) == 2);

  const auto three = three_maxima_instance();
  const Partition p3 = build_partition(carriers(three));
  const auto hosted = hosted_maxima(three, p3);
  REQUIRE(hosted.size() == 3);
  for (const auto& h : hosted) CHECK(p3.classes[h.cls].kind == ClassKind::intersection);
  CHECK(choose_degree(three, p3) == 3);
  CHECK(required_degree(three, p3) == 6);
}

TEST_CASE("continuity systems") {
  // A pure class with carrier {0} below the complement, degree 1 in R^2.
  const Partition origin = build_partition({Subspace::zero(2)});
  const IncidenceMatrix t0 = build_incidence(origin);
  const ContinuitySystem s0 = continuity_system(origin, t0, 1);
  CHECK(s0.unknowns() == 6);
  CHECK(s0.matrix.rows() == 1);
  CHECK(kernel_basis(s0).cols() == 5);

  const Partition line = build_partition({Subspace::axis(2, 0)});
  const ContinuitySystem s1 = continuity_system(line, build_incidence(line), 2);
  CHECK(s1.matrix.rows() == 3);
  CHECK(rank(s1.matrix) == 3);

  const Partition whole = build_partition({Subspace::full(2)});
  for (int r = 0; r <= 3; ++r) {
    const ContinuitySystem s = continuity_system(whole, build_incidence(whole), r);
    CHECK(s.matrix.rows() == 0);
    CHECK(static_cast<double>(kernel_basis(s).cols()) == binom(2 + r, r));
  }

  const auto ex2 = two_axes_problems();
  const Partition p = build_partition(carriers(ex2));
  const ContinuitySystem s = continuity_system(p, build_incidence(p), 2);
  CHECK(s.unknowns() == 4 * 6);
}

TEST_CASE("kernel elements satisfy T f = 0 exactly") {
  const auto ex2 = two_axes_problems();
  const Partition p = build_partition({ex2[0].carrier(), ex2[1].carrier(), Subspace::from_vectors(2, {vec({1, 1})})});
  const IncidenceMatrix t = build_incidence(p);
  const auto rows = t_rows(t);
  for (int r = 0; r <= 3; ++r) {
    const ContinuitySystem s = continuity_system(p, t, r);
    const QMatrix k = kernel_basis(s);
    for (std::size_t j = 0; j < k.cols(); ++j)
      for (const auto& img : apply_T(column_element(k, j, s), rows)) CHECK(img.is_zero());
  }
}

TEST_CASE("kernel does not depend on the sign convention") {
  const Partition p = build_partition({Subspace::axis(2, 0), Subspace::axis(2, 1)});
  IncidenceMatrix t = build_incidence(p);
  const QMatrix k = kernel_basis(continuity_system(p, t, 2));
  for (auto& row : t.rows) std::swap(row.hi, row.lo);
  const QMatrix flipped = kernel_basis(continuity_system(p, t, 2));
  CHECK(k == flipped);
}

TEST_CASE("canonical pieces for the two-axis family") {
  const SurrogateState s = build_surrogate(two_axes_problems());
  CHECK(s.partition.size() == 4);
  CHECK(s.incidence.size() == 4);
  CHECK(s.degree == 2);
  CHECK_FALSE(s.canonical.conflict);
  const auto& pieces = s.canonical.f.pieces;
  // x-axis piece: peak at (1/2, 0) with value 13/4.
  CHECK(eval(pieces[0], vec({0.5, 0})) == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(scan_argmax(pieces[0], vec({1, 0}), 0, 1) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(eval(pieces[1], vec({0, 1})) == doctest::Approx(4).epsilon(1e-12));
  // The origin piece is the constant U(0, 0) = 3.
  CHECK(pieces[2].degree() <= 0);
  CHECK(eval(pieces[2], vec({0, 0})) == doctest::Approx(3).epsilon(1e-12));
  // The complement piece matches both axis pieces exactly.
  CHECK(s.canonical.fits[3].constraint_residual <= 1e-9);
  for (double t : {-1.0, 0.0, 0.3, 2.0}) {
    CHECK(std::abs(eval(pieces[3], vec({t, 0})) - eval(pieces[0], vec({t, 0}))) <= 1e-9);
    CHECK(std::abs(eval(pieces[3], vec({0, t})) - eval(pieces[1], vec({0, t}))) <= 1e-9);
  }
}

TEST_CASE("V keeps the local maximizers on the axes") {
  const SurrogateState s = build_surrogate(two_axes_problems());
  CHECK(scan_argmax(s.V.pieces[0], vec({1, 0}), 0, 1) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(scan_argmax(s.V.pieces[1], vec({0, 1}), 0, 1) == doctest::Approx(1).epsilon(1e-4));
  CHECK(continuity_residual(s.V, s.partition, s.incidence, 100, 1.0, 3) <= 1e-9);
  CHECK(s.maxima.points.size() <= s.partition.size());

  // Maximal elements against a brute-force scan of V over the region.
  double best = -1e300;
  for (int i = 0; i <= 400; ++i)
    for (int j = 0; j <= 400; ++j) best = std::max(best, evaluate(s.V, s.partition, vec({i / 400.0, j / 400.0})));
  CHECK(s.maxima.value >= best - 1e-9);
  CHECK(s.maxima.value <= best + 1e-3);
  for (const auto& x : s.maxima.points)
    CHECK(evaluate(s.V, s.partition, x) == doctest::Approx(s.maxima.value).epsilon(1e-6));
}

TEST_CASE("single problem") {
  const SurrogateState s = build_surrogate({two_axes_problems()[0]});
  CHECK(s.partition.size() == 2);
  CHECK(s.incidence.size() == 1);
  CHECK(s.degree == 2);
}

TEST_CASE("degree diagnostics") {
  SurrogateOptions o;
  o.degree = 1;
  try {
    build_surrogate(two_axes_problems(), o);
    FAIL("expected a degree diagnostic");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("try --degree 2") != std::string::npos);
  }
  o.degree = kMaxSurrogateDegree + 1;
  CHECK_THROWS_AS(build_surrogate(two_axes_problems(), o), ResourceCapError);
  o.degree = 3;
  const SurrogateState s = build_surrogate(two_axes_problems(), o);
  CHECK(s.degree == 3);
  CHECK(s.degree_law == 2);
  CHECK(continuity_residual(s.V, s.partition, s.incidence, 100, 1.0, 4) <= 1e-9);
}

TEST_CASE("incompatible families are rejected") {
  const LocalProblem a = two_axes_problems()[0];
  const LocalProblem b = solved(box_problem("b", Subspace::axis(2, 1), vec({0}), vec({1}),
                                            qpoly(2, {{{0, 2}, -1}, {{0, 0}, 1}})));
  CHECK_THROWS_AS(build_surrogate({a, b}), IncompatibilityError);
}

TEST_CASE("three maxima in an intersection") {
  const SurrogateState s = build_surrogate(three_maxima_instance());
  CHECK(s.degree_law == 3);
  CHECK(s.degree == 6);
  CHECK(continuity_residual(s.V, s.partition, s.incidence, 100, 1.0, 5) <= 1e-9);
  CHECK(s.maxima.points.size() <= s.partition.size());
  // The x-axis piece peaks at the three hosted maxima.
  std::size_t axis = 0;
  for (std::size_t c = 0; c < s.partition.size(); ++c)
    if (s.partition.classes[c].kind == ClassKind::intersection) axis = c;
  const RPoly& q = s.canonical.f.pieces[axis];
  for (double x : {-1.0, 0.0, 1.0}) {
    CHECK(eval(q, vec({x, 0, 0})) >= eval(q, vec({x + 0.05, 0, 0})));
    CHECK(eval(q, vec({x, 0, 0})) >= eval(q, vec({x - 0.05, 0, 0})));
  }
}

TEST_CASE("evolve: refinement with a diagonal line") {
  const SurrogateState s = build_surrogate(two_axes_problems());
  const LocalProblem diag = solved(box_problem("diag", Subspace::from_vectors(2, {vec({1, 1})}), vec({0}),
                                               vec({1}), two_axes_utility()));
  const EvolveResult r = evolve(s, diag);
  CHECK_FALSE(r.duplicate);
  CHECK(r.state.partition.size() == 5);
  CHECK((r.r_new == r.r_old || r.r_new == r.r_old + 1));
  CHECK(r.degree_step_ok);
  CHECK(r.stability.samples == 1000);
  CHECK(r.stability.membership_residual <= 1e-9);
  CHECK(r.stability.agreement <= 1e-9);
  CHECK(r.stability.pass);
  CHECK(continuity_residual(r.state.V, r.state.partition, r.state.incidence, 100, 1.0, 6) <= 1e-9);
  CHECK(r.state.maxima.points.size() <= r.state.partition.size());
}

TEST_CASE("evolve: duplicates leave the state unchanged") {
  const SurrogateState s = build_surrogate(two_axes_problems());
  const EvolveResult r = evolve(s, two_axes_problems()[1]);
  CHECK(r.duplicate);
  CHECK(canonical_dump(snapshot(r.state)) == canonical_dump(snapshot(s)));
}

TEST_CASE("evolve: a new maximum in a full intersection raises the degree by one") {
  const auto two = two_maxima_instance();
  const SurrogateState s = build_surrogate(two);
  REQUIRE(s.degree_law == 2);
  const LocalProblem third = tilted_plane_problem();
  REQUIRE(third.solutions().size() == 1);
  CHECK((third.solutions()[0] - vec({0.5, 0, 0})).norm() <= 1e-6);
  const EvolveResult r = evolve(s, third);
  CHECK(r.r_new == r.r_old + 1);
  CHECK(r.degree_step_ok);
  CHECK(r.stability.membership_residual <= 1e-9);
  CHECK(r.stability.pass);
}

TEST_CASE("convergence on the two-axis scenario") {
  const QPoly u = two_axes_utility();
  auto seq = two_axes_problems();
  seq.push_back(solved(box_problem("square", Subspace::full(2), vec({0, 0}), vec({1, 1}), u)));
  const SampleBox region{vec({0, 0}), vec({1, 1})};
  const ConvergenceReport r = convergence_run(u, seq, region);
  CHECK((r.x_true - vec({0.5, 1})).norm() <= 1e-12);
  REQUIRE(r.m_hat.has_value());
  CHECK(*r.m_hat == 3);
  CHECK(r.rows.back().distance <= 1e-6);
  CHECK(r.converged);
  CHECK_FALSE(r.plateau);
  CHECK(r.to_csv() == convergence_run(u, seq, region).to_csv());

  std::vector<LocalProblem> control = {seq[1], solved(box_problem("seg", Subspace::axis(2, 0), vec({0.8}),
                                                                  vec({1}), u))};
  const ConvergenceReport c = convergence_run(u, control, region);
  CHECK_FALSE(c.m_hat.has_value());
  CHECK(c.plateau);
  CHECK(c.budget_exhausted);
  CHECK(c.rows.back().distance > 1e-6);

  const ConvergenceReport b = convergence_run(u, seq, region, {}, 2);
  CHECK(b.rows.size() == 2);
  CHECK(b.budget_exhausted);
}

TEST_CASE("convergence preconditions") {
  const SampleBox region{vec({0, 0}), vec({1, 1})};
  CHECK_THROWS_AS(convergence_run(qpoly(2, {{{1, 0}, 1}}), two_axes_problems(), region), ValidationError);
  CHECK_THROWS_AS(convergence_run(qpoly(2, {{{2, 0}, -1}, {{0, 2}, -1}}), two_axes_problems(), region),
                  ValidationError);
}

TEST_CASE("fitting is reproducible under a seed") {
  SurrogateOptions o;
  o.seed = 42;
  const auto a = canonical_dump(snapshot(build_surrogate(two_axes_problems(), o)));
  o.parallel = false;
  const auto b = canonical_dump(snapshot(build_surrogate(two_axes_problems(), o)));
  CHECK(a == b);
}
