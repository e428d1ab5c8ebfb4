#include "lgo/kernels.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace lgo;
using namespace lgo::testing;

namespace {

RPoly sample_poly() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> c(-1, 1);
  RPoly p(3);
  for (const auto& m : monomials_up_to(3, 5)) p.add_term(m, c(rng));
  return p;
}

}  // namespace

TEST_CASE("flat polynomial evaluation matches the sparse one") {
  const RPoly p = sample_poly();
  const FlatPoly f(p);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const Vector x = vec({u(rng), u(rng), u(rng)});
    CHECK(f(x) == doctest::Approx(eval(p, x)).epsilon(1e-12));
  }
}

TEST_CASE("lattice evaluation: parallel equals serial") {
  const FlatPoly f(sample_poly());
  const Lattice grid{vec({-1, -1, -1}), vec({0.05, 0.04, 0.1}), {41, 51, 21}};
  CHECK(grid.size() == 41u * 51u * 21u);
  const auto a = evaluate_lattice_serial(f, grid);
  const auto b = evaluate_lattice(f, grid);
  CHECK(a == b);
  const PointPredicate inside = [](const Eigen::VectorXd& x) { return x.sum() <= 0.5; };
  const auto c = evaluate_lattice_serial(f, grid, inside);
  const auto d = evaluate_lattice(f, grid, inside);
  CHECK(c == d);
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!inside(grid.point(i))) {
      ++rejected;
      CHECK(c[i] == -std::numeric_limits<double>::infinity());
    }
  CHECK(rejected > 0);
}

TEST_CASE("sample maps: parallel equals serial") {
  std::vector<Eigen::VectorXd> xs = uniform_samples(SampleBox{vec({-1, -1, -1}), vec({1, 1, 1})}, 5000, 9);
  const FlatPoly f(sample_poly());
  const SampleFn fn = [&](const Eigen::VectorXd& x) { return f(x); };
  CHECK(map_samples(xs, fn) == map_samples_serial(xs, fn));
  RPoly q = sample_poly();
  q.add_term({0, 0, 0}, 0.25);
  const FlatPoly g(q);
  CHECK(max_abs_difference(f, g, xs) == max_abs_difference_serial(f, g, xs));
  CHECK(max_abs_difference(f, g, xs) == doctest::Approx(0.25).epsilon(1e-12));
}
