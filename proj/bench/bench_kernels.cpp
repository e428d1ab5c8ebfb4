// Serial reference vs OpenMP for the sampling kernels.
#include "lgo/kernels.hpp"
#include "lgo/pr_category.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

lgo::RPoly dense_poly(std::size_t n, int degree) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-1, 1);
  lgo::RPoly p(n);
  for (const auto& m : lgo::monomials_up_to(n, degree)) p.add_term(m, c(rng));
  return p;
}

lgo::Lattice cube(std::size_t n, std::size_t per_axis) {
  return lgo::Lattice{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), -1.0),
                      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 2.0 / static_cast<double>(per_axis - 1)),
                      std::vector<std::size_t>(n, per_axis)};
}

const std::vector<Eigen::VectorXd>& samples() {
  static const auto xs = lgo::uniform_samples(
      lgo::SampleBox{Eigen::VectorXd::Constant(3, -1.0), Eigen::VectorXd::Constant(3, 1.0)}, 200000, 1);
  return xs;
}

template <bool Parallel>
void lattice(benchmark::State& state) {
  const lgo::FlatPoly f(dense_poly(3, 6));
  const lgo::Lattice grid = cube(3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto v = Parallel ? lgo::evaluate_lattice(f, grid) : lgo::evaluate_lattice_serial(f, grid);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * grid.size()));
}

template <bool Parallel>
void mapped(benchmark::State& state) {
  const lgo::FlatPoly f(dense_poly(3, 6));
  const lgo::SampleFn fn = [&](const Eigen::VectorXd& x) { return f(x); };
  for (auto _ : state) {
    auto v = Parallel ? lgo::map_samples(samples(), fn) : lgo::map_samples_serial(samples(), fn);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples().size()));
}

template <bool Parallel>
void difference(benchmark::State& state) {
  const lgo::FlatPoly f(dense_poly(3, 6)), g(dense_poly(3, 5));
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? lgo::max_abs_difference(f, g, samples())
                                      : lgo::max_abs_difference_serial(f, g, samples()));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * samples().size()));
}

}  // namespace

BENCHMARK(lattice<false>)->Name("evaluate_lattice/serial")->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(lattice<true>)->Name("evaluate_lattice/openmp")->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);
BENCHMARK(mapped<false>)->Name("map_samples/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(mapped<true>)->Name("map_samples/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(difference<false>)->Name("max_abs_difference/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(difference<true>)->Name("max_abs_difference/openmp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
