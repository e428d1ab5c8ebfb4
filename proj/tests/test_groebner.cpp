#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace lgo;
using namespace lgo::testing;

namespace {

ModuleElement elem(std::vector<QPoly> comps) { return ModuleElement(std::move(comps)); }

QPoly mono(std::size_t n, Monomial m, Rational c = 1) {
  QPoly p(n);
  p.add_term(m, c);
  return p;
}

ModuleElement random_combination(std::mt19937_64& rng, const std::vector<ModuleElement>& gens, int degree) {
  std::uniform_int_distribution<int> c(-3, 3);
  ModuleElement e(gens[0].rank(), gens[0].nvars());
  for (const auto& g : gens)
    for (const auto& m : monomials_up_to(g.nvars(), degree))
      if (rng() % 3 == 0) e.add_multiple(Rational(c(rng)), m, g);
  return e;
}

void check_s_vectors(const std::vector<ModuleElement>& basis, const ModuleOrder& ord) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) CHECK(reduce(s_vector(basis[i], basis[j], ord), basis, ord).is_zero());
}

// Column spaces of a and b agree (exact ranks).
bool same_span(const QMatrix& a, const QMatrix& b) {
  const std::size_t ra = rank(a), rb = rank(b);
  return ra == rb && rank(a.hcat(b)) == ra;
}

}  // namespace

TEST_CASE("leading terms") {
  const ModuleOrder pot;
  const auto a = leading_term(elem({mono(2, {2, 0}), mono(2, {0, 1})}), pot);
  CHECK(a.position == 0);
  CHECK(a.monomial == Monomial{2, 0});
  CHECK(a.coeff == 1);
  const auto b = leading_term(elem({QPoly(2), mono(2, {0, 3})}), pot);
  CHECK(b.position == 1);
  CHECK(b.monomial == Monomial{0, 3});
  const auto c = leading_term(elem({mono(2, {1, 0}) + mono(2, {0, 1}), QPoly(2)}), pot);
  CHECK(c.monomial == Monomial{1, 0});
  CHECK_THROWS(leading_term(ModuleElement(2, 2), pot));

  // Term-over-position: y^3 at position 1 beats x^2 at position 0.
  const auto d = leading_term(elem({mono(2, {2, 0}), mono(2, {0, 3})}), ModuleOrder{PositionRule::top});
  CHECK(d.position == 1);
}

TEST_CASE("reduction") {
  const ModuleElement g = elem({mono(2, {1, 0}), QPoly::constant(2, 1)});
  CHECK(reduce(g, {g}).is_zero());
  CHECK(reduce(elem({mono(2, {2, 0}), mono(2, {1, 0})}), {g}).is_zero());
  const ModuleElement y0 = elem({mono(2, {0, 1}), QPoly(2)});
  CHECK(reduce(y0, {elem({mono(2, {1, 0}), QPoly(2)})}) == y0);
}

TEST_CASE("Buchberger on small inputs") {
  const auto one = buchberger({elem({QPoly::constant(1, 1), QPoly::constant(1, 1)})});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == elem({QPoly::constant(1, 1), QPoly::constant(1, 1)}));

  const auto xy = buchberger({elem({mono(2, {1, 0})}), elem({mono(2, {0, 1})})});
  REQUIRE(xy.size() == 2);
  CHECK(((xy[0] == elem({mono(2, {1, 0})}) && xy[1] == elem({mono(2, {0, 1})})) ||
         (xy[1] == elem({mono(2, {1, 0})}) && xy[0] == elem({mono(2, {0, 1})}))));

  const std::vector<ModuleElement> gens = {elem({mono(2, {1, 0}), QPoly(2)}), elem({mono(2, {0, 1}), QPoly(2)}),
                                           elem({QPoly(2), QPoly::constant(2, 1)})};
  const auto basis = buchberger(gens);
  CHECK(basis.size() == 3);
  check_s_vectors(basis, {});
  for (const auto& g : gens) CHECK(reduce(g, basis).is_zero());
}

TEST_CASE("Buchberger: S-vectors, membership and idempotence") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> c(-2, 2);
  for (const PositionRule rule : {PositionRule::pot, PositionRule::top}) {
    const ModuleOrder ord{rule};
    for (int trial = 0; trial < 6; ++trial) {
      const std::size_t rank_ = 1 + static_cast<std::size_t>(trial % 3), n = 2;
      std::vector<ModuleElement> gens;
      for (int g = 0; g < 3; ++g) {
        std::vector<QPoly> comps;
        for (std::size_t i = 0; i < rank_; ++i) {
          QPoly p(n);
          for (const auto& m : monomials_up_to(n, 2))
            if (rng() % 3 == 0) p.add_term(m, Rational(c(rng)));
          comps.push_back(p);
        }
        gens.push_back(elem(comps));
      }
      const auto basis = buchberger(gens, ord);
      check_s_vectors(basis, ord);
      for (const auto& g : gens) CHECK(reduce(g, basis, ord).is_zero());
      for (int k = 0; k < 10; ++k) CHECK(reduce(random_combination(rng, gens, 2), basis, ord).is_zero());
      // Determinism.
      CHECK(buchberger(gens, ord) == basis);
    }
  }
}

TEST_CASE("normal forms are idempotent") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-4, 4);
  const std::vector<ModuleElement> g = {elem({mono(2, {1, 0}) + mono(2, {0, 1}), QPoly::constant(2, 1)}),
                                        elem({mono(2, {0, 2}), mono(2, {1, 0})})};
  for (int i = 0; i < 1000; ++i) {
    std::vector<QPoly> comps(2, QPoly(2));
    for (auto& p : comps)
      for (const auto& m : monomials_up_to(2, 3))
        if (rng() % 2) p.add_term(m, ratio(c(rng), 1 + static_cast<long>(rng() % 4)));
    const ModuleElement r = reduce(elem(comps), g);
    CHECK(reduce(r, g) == r);
  }
}

TEST_CASE("resource caps keep the partial basis") {
  BuchbergerLimits tight;
  tight.max_basis = 1;
  const std::vector<ModuleElement> gens = {elem({mono(2, {2, 0}) + mono(2, {0, 1})}),
                                           elem({mono(2, {1, 1}) + QPoly::constant(2, 1)})};
  try {
    buchberger(gens, {}, tight);
    FAIL("expected a cap error");
  } catch (const BuchbergerCapError& e) {
    CHECK_FALSE(e.partial().empty());
  }
}

TEST_CASE("kernel generators") {
  // lambda = 2, (f, g) -> f - g on the whole line: kernel (1, 1).
  const std::vector<TRow> equal = {TRow{{{0, 1}, {1, -1}}, Subspace::full(1)}};
  const auto k1 = kernel_generators(2, 1, equal);
  REQUIRE(k1.size() == 1);
  CHECK(k1[0] == elem({QPoly::constant(1, 1), QPoly::constant(1, 1)}));

  // lambda = 1, f -> f: only the zero element.
  const auto k0 = kernel_generators(1, 1, {TRow{{{0, 1}}, Subspace::full(1)}});
  CHECK(k0.empty());

  // (f, g) -> f(0) - g(0): generated by (1, 1), (x, 0), (0, x).
  const std::vector<TRow> at_zero = {TRow{{{0, 1}, {1, -1}}, Subspace::zero(1)}};
  const auto k = kernel_generators(2, 1, at_zero);
  for (const auto& g : k)
    for (const auto& img : apply_T(g, at_zero)) CHECK(img.is_zero());
  const std::vector<ModuleElement> expected = {elem({QPoly::constant(1, 1), QPoly::constant(1, 1)}),
                                               elem({mono(1, {1}), QPoly(1)}), elem({QPoly(1), mono(1, {1})})};
  for (int r = 0; r <= 3; ++r) CHECK(same_span(degree_slice(k, 1, r), degree_slice(expected, 1, r)));
}

TEST_CASE("degree slices of the kernel generators match the continuity nullspace") {
  const std::vector<std::vector<Subspace>> families = {
      {Subspace::axis(2, 0)},
      {Subspace::axis(2, 0), Subspace::axis(2, 1)},
      {Subspace::zero(2)},
      {Subspace::from_vectors(2, {vec({1, 2})})},
      {Subspace::axis(2, 1), Subspace::from_vectors(2, {vec({1, -1})})},
      {Subspace::full(1)},
  };
  for (const auto& fam : families) {
    const Partition p = build_partition(fam);
    const IncidenceMatrix t = build_incidence(p);
    const auto rows = t_rows(t);
    const auto gens = kernel_generators(p.size(), p.ambient_dim, rows);
    for (const auto& g : gens)
      for (const auto& img : apply_T(g, rows)) CHECK(img.is_zero());
    for (int r = 0; r <= 3; ++r) {
      const QMatrix slice = degree_slice(gens, p.ambient_dim, r);
      const QMatrix kernel = kernel_basis(continuity_system(p, t, r));
      CHECK(same_span(slice, kernel));
    }
  }
}

TEST_CASE("module element JSON") {
  const ModuleElement e = elem({mono(2, {1, 0}, ratio(-2, 3)), mono(2, {0, 0}, 5)});
  const auto j = to_json(e);
  CHECK(j.size() == 2);
  CHECK(j[1]["position"] == 1);
  CHECK(module_element_from_json(j, 2, 2) == e);
  CHECK_THROWS_AS(module_element_from_json(j, 1, 2), ValidationError);
}
