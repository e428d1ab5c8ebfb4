#include "lgo/glue.hpp"

#include "lgo/errors.hpp"

namespace lgo {

std::string to_string(GlueStatus s) {
  switch (s) {
    case GlueStatus::exact_point: return "exact_point";
    case GlueStatus::overdetermined_consistent: return "overdetermined_consistent";
    case GlueStatus::inconsistent: return "inconsistent";
    case GlueStatus::underdetermined: return "underdetermined";
  }
  return "unknown";
}

GlueResult glue(const std::vector<LocalProblem>& problems) {
  if (problems.empty()) throw ValidationError("glue: no problems");
  const std::size_t n = problems.front().ambient_dim();
  std::vector<AffineSet> preimages;
  QMatrix solutions(n, 0);
  GlueResult out;
  for (const auto& p : problems) {
    if (p.ambient_dim() != n) throw ValidationError("glue: problems live in different ambient spaces");
    if (!p.solved()) throw ValidationError("glue: problem '" + p.id() + "' has not been solved");
    if (p.solutions().size() != 1)
      throw ValidationError("glue: problem '" + p.id() + "' does not have a unique solution");
    const Vector& xk = p.solutions().front();
    preimages.push_back({xk, p.carrier().complement()});
    solutions = solutions.hcat(QMatrix::from_double(xk));
    out.dim_sum += p.carrier().dim();
  }

  QMatrix stacked(0, n);
  for (const auto& p : problems) stacked = stacked.vcat(p.carrier().generators().transpose());
  if (rank(solutions) == n)
    out.informative = "solutions_span";
  else if (rank(stacked) == n)
    out.informative = "constraint_rank";
  else
    out.informative = "none";

  const AffineIntersection hit = intersect_affine(preimages);
  out.point = hit.set.point;
  out.residual = hit.residual;
  out.directions = hit.set.directions;
  switch (hit.status) {
    case AffineStatus::empty: out.status = GlueStatus::inconsistent; break;
    case AffineStatus::affine: out.status = GlueStatus::underdetermined; break;
    case AffineStatus::point:
      out.status = out.dim_sum > n ? GlueStatus::overdetermined_consistent : GlueStatus::exact_point;
      break;
  }
  out.distances = glue_quality(out.point, problems);
  return out;
}

std::vector<double> glue_quality(const Vector& x, const std::vector<LocalProblem>& problems) {
  std::vector<double> d;
  for (const auto& p : problems) {
    if (p.solutions().empty()) throw ValidationError("glue_quality: problem '" + p.id() + "' has no solution");
    d.push_back((p.carrier().project(x) - p.solutions().front()).norm());
  }
  return d;
}

bool check_separability(const QPoly& u, const Subspace& s) {
  const std::size_t d = s.dim();
  const QPoly rotated = substitute(u, s.generators().hcat(s.complement().generators()));
  for (const auto& [m, c] : rotated.terms()) {
    bool inside = false, outside = false;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] > 0) (i < d ? inside : outside) = true;
    if (inside && outside) return false;
  }
  return true;
}

bool restrictions_of(const QPoly& u, const std::vector<LocalProblem>& problems) {
  for (const auto& p : problems)
    if (!poly_equal(restrict(u, p.carrier()), restrict(p.utility(), p.carrier()))) return false;
  return true;
}

nlohmann::json to_json(const GlueResult& r) {
  return {{"point", std::vector<double>(r.point.data(), r.point.data() + r.point.size())},
          {"residual", r.residual},
          {"status", to_string(r.status)},
          {"solution_set_dim", r.directions.dim()},
          {"dim_sum", r.dim_sum},
          {"informative", r.informative},
          {"per_k_distances", r.distances}};
}

}  // namespace lgo
