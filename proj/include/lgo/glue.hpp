#pragma once

#include "lgo/problem.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lgo {

enum class GlueStatus { exact_point, overdetermined_consistent, inconsistent, underdetermined };

std::string to_string(GlueStatus s);

struct GlueResult {
  GlueStatus status = GlueStatus::underdetermined;
  Vector point;           // the glued point, or the least-norm representative
  double residual = 0.0;  // least-squares residual of the stacked constraints
  Subspace directions;    // solution set directions (dim 0 for a point)
  std::size_t dim_sum = 0;
  /// Which informativeness test passed: "solutions_span" (the local
  /// solutions span the space), "constraint_rank" (the stacked projection
  /// constraints have full rank) or "none".
  std::string informative;
  std::vector<double> distances;
};

/// Intersects the preimages {x : project(x, L^k) = x^k} of the local
/// solutions. Each problem must be solved with a single solution.
GlueResult glue(const std::vector<LocalProblem>& problems);

/// |project(x, L^k) - x^k| for every problem.
std::vector<double> glue_quality(const Vector& x, const std::vector<LocalProblem>& problems);

/// U splits as a polynomial in S-coordinates plus one in S-perp coordinates.
/// Decided exactly on the rational generators.
bool check_separability(const QPoly& u, const Subspace& s);

/// Every local utility is the restriction of U to its carrier.
bool restrictions_of(const QPoly& u, const std::vector<LocalProblem>& problems);

nlohmann::json to_json(const GlueResult& r);

}  // namespace lgo
