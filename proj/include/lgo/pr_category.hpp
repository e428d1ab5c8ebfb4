#pragma once

#include "lgo/problem.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lgo {

struct MorphismWitness {
  std::string source;
  std::string target;
  bool containment = false;
  bool restriction_equal = false;
  bool dim_leq = false;

  bool exists() const { return containment && restriction_equal && dim_leq; }
};

/// Does s_k -> s_j exist? Each of the three conditions is reported.
MorphismWitness check_morphism(const LocalProblem& s_k, const LocalProblem& s_j);

/// Whether the two utilities agree on the intersection of the carriers (exact).
bool utilities_agree(const LocalProblem& a, const LocalProblem& b);

/// Whether the feasible sets may overlap. Ball intersections that cannot be
/// represented count as overlapping.
bool may_overlap(const LocalProblem& a, const LocalProblem& b);

/// The meet of two problems: intersected carrier and region, the common
/// utility. Unsolved. Throws ValidationError when the regions are disjoint
/// and IncompatibilityError when the utilities disagree there.
LocalProblem meet(const LocalProblem& s_k, const LocalProblem& s_j);

/// The maximal object of a compatible family. Members dominated by a
/// morphism into another member are dropped; when one member remains it is
/// the maximal object itself.
struct StarProblem {
  std::vector<LocalProblem> members;
  Subspace carrier;
  std::vector<Vector> solutions;
  double value = 0.0;

  bool single() const { return members.size() == 1; }
};

/// Requires solved problems. Throws IncompatibilityError with the offending pair.
StarProblem build_star(const std::vector<LocalProblem>& problems);

/// x is in F(s): the nearest feasible point to x's projection is a solution.
bool in_F(const Vector& x, const LocalProblem& s);
bool in_F(const Vector& x, const StarProblem& s);

/// Points of the union of member regions closest to x's projection onto the
/// star carrier.
std::vector<Vector> gamma_star(const Vector& x, const StarProblem& s);

struct SampleBox {
  Vector lower;
  Vector upper;
};

/// `count` seeded uniform draws from the box.
std::vector<Vector> uniform_samples(const SampleBox& box, std::size_t count, std::uint64_t seed);

/// Bounding box of the feasible sets, each side widened by `inflate` times its width.
SampleBox bounding_box(const std::vector<LocalProblem>& problems, double inflate);

struct CheckReport {
  std::string check;
  bool verdict = true;
  std::size_t violations = 0;
  std::vector<nlohmann::json> counterexamples;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t targeted = 0;
};

nlohmann::json to_json(const CheckReport& r);

struct CheckOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::optional<SampleBox> box;  // default: bounding box inflated by 50%
  std::size_t max_counterexamples = 10;
  bool parallel = true;
};

/// Samples in_F(x, s_j) => in_F(x, s_k) for a morphism s_k -> s_j.
CheckReport check_presheaf(const LocalProblem& s_k, const LocalProblem& s_j, const CheckOptions& opts = {});

/// Sampled equalizer test: F(s*) is inside every F(s^k), and points of the
/// intersection of the F(s^k) whose local choices agree on every meet are in F(s*).
CheckReport check_gluing(const std::vector<LocalProblem>& problems, const CheckOptions& opts = {});

}  // namespace lgo
