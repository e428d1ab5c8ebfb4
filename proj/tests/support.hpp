#pragma once

#include "lgo/glue.hpp"
#include "lgo/io.hpp"
#include "lgo/surrogate.hpp"

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <random>
#include <utility>

namespace lgo::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

using Term = std::pair<Monomial, Rational>;

inline QPoly qpoly(std::size_t n, std::initializer_list<Term> terms) {
  QPoly p(n);
  for (const auto& [m, c] : terms) p.add_term(m, c);
  return p;
}

inline LocalProblem box_problem(std::string id, Subspace carrier, Vector lower, Vector upper, QPoly u) {
  return LocalProblem(std::move(id), FeasibleSet(std::move(carrier), Box{std::move(lower), std::move(upper)}),
                      std::move(u));
}

// U = 3 - x^2 - y^2 + 2y + x
inline QPoly two_axes_utility() {
  return qpoly(2, {{{0, 0}, 3}, {{2, 0}, -1}, {{0, 2}, -1}, {{0, 1}, 2}, {{1, 0}, 1}});
}

inline std::vector<LocalProblem> two_axes_problems() {
  const QPoly u = two_axes_utility();
  return {solved(box_problem("x-axis", Subspace::axis(2, 0), vec({0}), vec({1}), u)),
          solved(box_problem("y-axis", Subspace::axis(2, 1), vec({0}), vec({1}), u))};
}

// s^k: u = x on [0,1] x {0};  s^j: u = x + 2y on the triangle x + y <= 1, x, y >= 0.
inline LocalProblem segment_problem() {
  return solved(box_problem("k", Subspace::axis(2, 0), vec({0}), vec({1}), qpoly(2, {{{1, 0}, 1}})));
}

inline LocalProblem triangle_problem() {
  Eigen::MatrixXd a(3, 2);
  a << 1, 1, -1, 0, 0, -1;
  return solved(LocalProblem("j", FeasibleSet(Subspace::full(2), Polytope{a, vec({1, 0, 0})}),
                             qpoly(2, {{{1, 0}, 1}, {{0, 1}, 2}})));
}

// -(x^3 - x)^2 - rest^2 in three variables: maxima at x in {-1, 0, 1}.
inline QPoly triple_well(std::size_t rest) {
  QPoly p = qpoly(3, {{{6, 0, 0}, -1}, {{4, 0, 0}, 2}, {{2, 0, 0}, -1}});
  Monomial sq(3, 0);
  sq[rest] = 2;
  p.add_term(sq, -1);
  return p;
}

// Planes z = 0 and y = 0 of R^3 whose meet (the x-axis) hosts three maxima.
inline std::vector<LocalProblem> three_maxima_instance() {
  return {solved(box_problem("z=0", Subspace::coordinate(3, {0, 1}), vec({-1.5, -1.5}), vec({1.5, 1.5}),
                             triple_well(1))),
          solved(box_problem("y=0", Subspace::coordinate(3, {0, 2}), vec({-1.5, -1.5}), vec({1.5, 1.5}),
                             triple_well(2)))};
}

// Planes z = 0 and y = 0 of R^3 meeting in the x-axis, hosting the maxima x = +-1.
inline std::vector<LocalProblem> two_maxima_instance() {
  const QPoly w = qpoly(3, {{{4, 0, 0}, -1}, {{2, 0, 0}, 2}, {{0, 0, 0}, -1}});
  QPoly u1 = w, u2 = w;
  u1.add_term({0, 2, 0}, -1);
  u2.add_term({0, 0, 2}, -1);
  return {solved(box_problem("z=0", Subspace::coordinate(3, {0, 1}), vec({-1.5, -1.5}), vec({1.5, 1.5}), u1)),
          solved(box_problem("y=0", Subspace::coordinate(3, {0, 2}), vec({-1.5, -1.5}), vec({1.5, 1.5}), u2))};
}

// The plane spanned by (1,0,0) and (0,1,1) meets both planes above in the
// x-axis; on x in [0, 1/2] its maximum is (1/2, 0, 0), a third hosted maximum.
inline LocalProblem tilted_plane_problem() {
  const QPoly u = qpoly(3, {{{4, 0, 0}, -1}, {{2, 0, 0}, 2}, {{0, 0, 0}, -1}, {{0, 2, 0}, -1}, {{0, 0, 2}, -1}});
  return solved(box_problem("tilted", Subspace::from_vectors(3, {vec({1, 0, 0}), vec({0, 1, 1})}), vec({0, -1}),
                            vec({0.5, 1}), u));
}

// Both axes of the plane share the maximizer 0 of -x^2 - y^2.
inline std::vector<LocalProblem> origin_maximum_instance() {
  const QPoly u = qpoly(2, {{{2, 0}, -1}, {{0, 2}, -1}});
  return {solved(box_problem("x", Subspace::axis(2, 0), vec({-1}), vec({1}), u)),
          solved(box_problem("y", Subspace::axis(2, 1), vec({-1}), vec({1}), u))};
}

inline LocalProblem diagonal_problem() {
  return solved(box_problem("diag", Subspace::from_vectors(2, {vec({1, 1})}), vec({0}), vec({1}), two_axes_utility()));
}

inline std::vector<LocalProblem> two_axes_scenario() {
  auto seq = two_axes_problems();
  seq.push_back(solved(box_problem("square", Subspace::full(2), vec({0, 0}), vec({1, 1}), two_axes_utility())));
  return seq;
}

// Never covers the maximizer (1/2, 1).
inline std::vector<LocalProblem> control_scenario() {
  return {two_axes_problems()[1],
          solved(box_problem("seg", Subspace::axis(2, 0), vec({0.8}), vec({1}), two_axes_utility()))};
}

inline std::vector<Subspace> carriers(const std::vector<LocalProblem>& ps) {
  std::vector<Subspace> out;
  for (const auto& p : ps) out.push_back(p.carrier());
  return out;
}

// U = c + sum_i (b_i x_i - a_i x_i^2) over a product box, split into random
// coordinate blocks. The true maximizer clamps b_i / 2a_i into the box.
struct SeparableInstance {
  QPoly utility;
  std::vector<LocalProblem> problems;
  Vector argmax;
};

inline SeparableInstance random_separable(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> ai(1, 9), bi(-12, 12), lo(-6, 0), width(2, 8);
  SeparableInstance inst;
  inst.utility = QPoly::constant(n, Rational(static_cast<long>(bi(rng))));
  inst.argmax = Vector(static_cast<Eigen::Index>(n));
  Vector lower(static_cast<Eigen::Index>(n)), upper(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Rational a(ai(rng), 2), b(bi(rng), 2);
    Monomial m1(n, 0), m2(n, 0);
    m1[i] = 1;
    m2[i] = 2;
    inst.utility.add_term(m1, b);
    inst.utility.add_term(m2, -a);
    const auto ii = static_cast<Eigen::Index>(i);
    lower(ii) = lo(rng) / 4.0;
    upper(ii) = lower(ii) + width(rng) / 4.0;
    inst.argmax(ii) = std::clamp(to_double(Rational(b / (2 * a))), lower(ii), upper(ii));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t start = 0;
  while (start < n) {
    const std::size_t len = 1 + rng() % (n - start);
    std::vector<std::size_t> block(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(start + len));
    std::sort(block.begin(), block.end());
    Vector bl(static_cast<Eigen::Index>(len)), bu(static_cast<Eigen::Index>(len));
    for (std::size_t k = 0; k < len; ++k) {
      bl(static_cast<Eigen::Index>(k)) = lower(static_cast<Eigen::Index>(block[k]));
      bu(static_cast<Eigen::Index>(k)) = upper(static_cast<Eigen::Index>(block[k]));
    }
    inst.problems.push_back(solved(box_problem("block" + std::to_string(inst.problems.size()),
                                               Subspace::coordinate(n, block), bl, bu, inst.utility)));
    start += len;
  }
  return inst;
}

}  // namespace lgo::testing
