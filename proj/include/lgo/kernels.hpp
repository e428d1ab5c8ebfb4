#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference with identical results; tests compare the two and bench/ times them.

#include "lgo/polynomial.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace lgo {

/// Polynomial flattened to contiguous exponent/coefficient arrays so that
/// evaluation is allocation-free and safe to call concurrently.
class FlatPoly {
public:
  FlatPoly() = default;
  explicit FlatPoly(const RPoly& p);

  std::size_t nvars() const { return nvars_; }
  double operator()(const double* x) const;
  double operator()(const Eigen::VectorXd& x) const { return (*this)(x.data()); }

private:
  std::size_t nvars_ = 0;
  int max_exp_ = 0;
  std::vector<int> exps_;
  std::vector<double> coeffs_;
};

/// Regular grid lower + i * step, i_k in [0, counts_k).
struct Lattice {
  Eigen::VectorXd lower;
  Eigen::VectorXd step;
  std::vector<std::size_t> counts;

  std::size_t size() const;
  Eigen::VectorXd point(std::size_t index) const;
};

using PointPredicate = std::function<bool(const Eigen::VectorXd&)>;

/// Values of f on the lattice; points rejected by `inside` get -infinity.
std::vector<double> evaluate_lattice_serial(const FlatPoly& f, const Lattice& grid,
                                            const PointPredicate& inside = nullptr);
std::vector<double> evaluate_lattice(const FlatPoly& f, const Lattice& grid,
                                     const PointPredicate& inside = nullptr);

using SampleFn = std::function<double(const Eigen::VectorXd&)>;

/// out[i] = fn(samples[i]). fn must be safe to call concurrently.
std::vector<double> map_samples_serial(const std::vector<Eigen::VectorXd>& samples, const SampleFn& fn);
std::vector<double> map_samples(const std::vector<Eigen::VectorXd>& samples, const SampleFn& fn);

/// max_i |f(x_i) - g(x_i)|.
double max_abs_difference_serial(const FlatPoly& f, const FlatPoly& g, const std::vector<Eigen::VectorXd>& xs);
double max_abs_difference(const FlatPoly& f, const FlatPoly& g, const std::vector<Eigen::VectorXd>& xs);

}  // namespace lgo
