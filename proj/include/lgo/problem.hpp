#pragma once

#include "lgo/polynomial.hpp"
#include "lgo/space.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lgo {

/// How a solution set was obtained, and how well it checks out.
struct Certificate {
  std::string method;      // exact_qp, exact_lp, exact_concave, ball_qp, grid_polish, degenerate
  double value = 0.0;      // best utility value
  double residual = 0.0;   // first-order (projected gradient) residual, max over maximizers
  double grid_step = 0.0;  // effective step for grid_polish
  bool numerical = false;  // true when not certified exactly
  bool degenerate = false; // constant utility: every feasible point is optimal
};

/// A local problem: maximize `utility` (in ambient variables) over a compact
/// feasible set of a carrier subspace. `solutions` is filled by the solver.
class LocalProblem {
public:
  LocalProblem() = default;
  LocalProblem(std::string id, FeasibleSet feasible, QPoly utility);

  const std::string& id() const { return id_; }
  const Subspace& carrier() const { return feasible_.carrier(); }
  const FeasibleSet& feasible() const { return feasible_; }
  const QPoly& utility() const { return utility_; }
  std::size_t ambient_dim() const { return carrier().ambient_dim(); }

  bool solved() const { return certificate_.has_value(); }
  const std::vector<Vector>& solutions() const { return solutions_; }
  const std::optional<Certificate>& certificate() const { return certificate_; }

  /// Installs a solution set; checks feasibility and that every point attains
  /// the certified value within 1e-9.
  void set_solutions(std::vector<Vector> solutions, Certificate certificate);

  /// Utility value at an ambient point.
  double value_at(const Vector& x) const;

private:
  std::string id_;
  FeasibleSet feasible_;
  QPoly utility_;
  std::vector<Vector> solutions_;
  std::optional<Certificate> certificate_;
};

nlohmann::json to_json(const Certificate& c);

}  // namespace lgo
