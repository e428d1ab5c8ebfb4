#pragma once

#include "lgo/problem.hpp"

namespace lgo {

struct SolverOptions {
  double grid_step = 1e-2;
  double polish_tol = 1e-10;
  /// Maximizers are reported when within this of the best value ...
  double tie_value = 1e-6;
  /// ... and farther than this from every other reported maximizer.
  double cluster_distance = 1e-4;
  std::size_t max_grid_points = 4'000'000;
  std::size_t max_polish_starts = 64;
  bool parallel = true;
};

struct LocalSolution {
  std::vector<Vector> points;  // ambient coordinates
  Certificate certificate;
};

/// Maximizes a polynomial in carrier coordinates over a feasible set.
/// Points are returned in carrier coordinates.
LocalSolution maximize_on(const RPoly& f, const FeasibleSet& set, const SolverOptions& opts = {});

/// Solves a local problem; points are in ambient coordinates.
LocalSolution solve_local(const LocalProblem& problem, const SolverOptions& opts = {});

/// Copy of `problem` with its solution set installed.
LocalProblem solved(LocalProblem problem, const SolverOptions& opts = {});

struct ConcavityVerdict {
  bool strictly_concave = false;
  bool numerical = false;  // decided by sampled Hessians rather than exactly
};

/// Strict concavity of p restricted to S. Degree <= 2 restrictions are
/// decided exactly by leading principal minors of the rational Hessian.
ConcavityVerdict is_strictly_concave(const QPoly& p, const Subspace& s, unsigned seed = 7);

/// Quadratic model (H, g, c) of a polynomial of degree <= 2.
struct QuadraticParts {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  double c = 0.0;
};
QuadraticParts quadratic_parts(const RPoly& p);

}  // namespace lgo
