#include "lgo/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgo {

FlatPoly::FlatPoly(const RPoly& p) : nvars_(p.nvars()) {
  for (const auto& [m, c] : p.terms()) {
    exps_.insert(exps_.end(), m.begin(), m.end());
    coeffs_.push_back(c);
    for (int e : m) max_exp_ = std::max(max_exp_, e);
  }
}

double FlatPoly::operator()(const double* x) const {
  double sum = 0.0;
  const std::size_t nterms = coeffs_.size();
  for (std::size_t t = 0; t < nterms; ++t) {
    double term = coeffs_[t];
    const int* e = exps_.data() + t * nvars_;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    sum += term;
  }
  return sum;
}

std::size_t Lattice::size() const {
  std::size_t n = 1;
  for (auto c : counts) n *= c;
  return n;
}

Eigen::VectorXd Lattice::point(std::size_t index) const {
  Eigen::VectorXd x(lower.size());
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    const std::size_t c = counts[static_cast<std::size_t>(k)];
    x(k) = lower(k) + static_cast<double>(index % c) * step(k);
    index /= c;
  }
  return x;
}

namespace {

double lattice_value(const FlatPoly& f, const Lattice& grid, const PointPredicate& inside, std::size_t i) {
  const Eigen::VectorXd x = grid.point(i);
  if (inside && !inside(x)) return -std::numeric_limits<double>::infinity();
  return f(x);
}

}  // namespace

std::vector<double> evaluate_lattice_serial(const FlatPoly& f, const Lattice& grid, const PointPredicate& inside) {
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lattice_value(f, grid, inside, i);
  return out;
}

std::vector<double> evaluate_lattice(const FlatPoly& f, const Lattice& grid, const PointPredicate& inside) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lattice_value(f, grid, inside, static_cast<std::size_t>(i));
  return out;
}

std::vector<double> map_samples_serial(const std::vector<Eigen::VectorXd>& samples, const SampleFn& fn) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = fn(samples[i]);
  return out;
}

std::vector<double> map_samples(const std::vector<Eigen::VectorXd>& samples, const SampleFn& fn) {
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<double> out(samples.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = fn(samples[static_cast<std::size_t>(i)]);
  return out;
}

double max_abs_difference_serial(const FlatPoly& f, const FlatPoly& g, const std::vector<Eigen::VectorXd>& xs) {
  double m = 0.0;
  for (const auto& x : xs) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

double max_abs_difference(const FlatPoly& f, const FlatPoly& g, const std::vector<Eigen::VectorXd>& xs) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& x = xs[static_cast<std::size_t>(i)];
    m = std::max(m, std::abs(f(x) - g(x)));
  }
  return m;
}

}  // namespace lgo
