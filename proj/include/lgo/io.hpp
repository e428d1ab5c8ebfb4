#pragma once

#include "lgo/surrogate.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lgo {

/// Reads and parses a JSON file; syntax errors carry line and column.
nlohmann::json read_json_file(const std::string& path);

/// Sorted keys, doubles as %.17g, two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

struct ProblemFile {
  std::size_t ambient_dim = 0;
  std::vector<LocalProblem> problems;
};

/// { "ambient_dim": n, "problems": [ { "id", "basis": [[..]], "feasible":
/// {"type": "box"|"polytope"|"ball", ...}, "utility": [..] } ] }.
/// Shapes are given in the coordinates of the orthonormalized basis.
ProblemFile parse_problem_file(const nlohmann::json& j);
LocalProblem parse_problem(const nlohmann::json& j, std::size_t ambient_dim, const std::string& where);

/// Problem definition; solutions and certificate are added when solved.
nlohmann::json to_json(const LocalProblem& p);

nlohmann::json vector_json(const Vector& v);
Vector parse_vector(const nlohmann::json& j, std::size_t size, const std::string& where);

struct Scenario {
  std::size_t ambient_dim = 0;
  QPoly true_utility;
  std::vector<LocalProblem> sequence;
  std::optional<SampleBox> region;
};

/// A problem file with "true_utility", "sequence" (instead of "problems")
/// and an optional "region": {"lower", "upper"}.
Scenario parse_scenario(const nlohmann::json& j);

nlohmann::json snapshot(const SurrogateState& s);

/// Rebuilds the state from the problems and options of a snapshot and
/// checks that the stored content matches. Throws ValidationError.
SurrogateState load_snapshot(const nlohmann::json& j);

/// V sampled on a regular grid of the region (first two coordinates; the
/// others sit at the region centre).
std::string grid_csv(const PiecewiseFn& f, const Partition& p, const SampleBox& region, std::size_t per_axis);

}  // namespace lgo
