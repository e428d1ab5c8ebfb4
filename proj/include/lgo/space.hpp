#pragma once

#include "lgo/exact_linalg.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace lgo {

/// A point of the ambient space, in the standard orthonormal basis.
using Vector = Eigen::VectorXd;

inline constexpr double kOrthonormalTol = 1e-12;
inline constexpr double kFeasibilityTol = 1e-9;

/// Linear subspace of R^n. Keeps an exact rational generator matrix (for
/// symbolic restriction and exact intersections) next to an orthonormal
/// float basis (for projections and distances). Both are n x d.
class Subspace {
public:
  Subspace() = default;

  /// Columns of `gens` span the subspace; dependent columns are dropped.
  static Subspace from_generators(const QMatrix& gens);
  /// Each vector is one spanning direction.
  static Subspace from_vectors(std::size_t ambient_dim, const std::vector<Vector>& spanning);
  static Subspace full(std::size_t ambient_dim);
  static Subspace zero(std::size_t ambient_dim);
  static Subspace axis(std::size_t ambient_dim, std::size_t index);
  static Subspace coordinate(std::size_t ambient_dim, const std::vector<std::size_t>& indices);

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }

  const Eigen::MatrixXd& basis() const { return basis_; }
  const QMatrix& generators() const { return generators_; }

  /// Exact rows whose common nullspace is this subspace.
  QMatrix constraint_rows() const;
  /// Orthogonal complement, exactly.
  Subspace complement() const;

  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol = kFeasibilityTol) const;
  bool contains(const Subspace& other, double tol = kFeasibilityTol) const;
  /// Equality by principal angles.
  bool same_as(const Subspace& other, double tol = kFeasibilityTol) const;

private:
  std::size_t ambient_dim_ = 0;
  QMatrix generators_;
  Eigen::MatrixXd basis_;
};

Vector project(const Vector& x, const Subspace& s);

/// Exact intersection via the nullspace of the stacked complement rows.
Subspace intersect_subspaces(const std::vector<Subspace>& subspaces);
/// Smallest subspace containing all inputs.
Subspace sum_subspaces(const std::vector<Subspace>& subspaces);

struct AffineSet {
  Vector point;
  Subspace directions;

  bool contains(const Vector& x, double tol = kFeasibilityTol) const;
};

enum class AffineStatus { point, affine, empty };

struct AffineIntersection {
  AffineStatus status = AffineStatus::empty;
  /// Solution set; for `empty` the minimal-residual witness with the
  /// directions of the homogeneous system.
  AffineSet set;
  double residual = 0.0;
};

/// Solves the stacked membership constraints exactly (rational least
/// squares, minimum norm) and classifies the solution set.
AffineIntersection intersect_affine(const std::vector<AffineSet>& sets);

struct Box {
  Vector lower;
  Vector upper;
};

/// { t : A t <= b } in carrier coordinates.
struct Polytope {
  Eigen::MatrixXd A;
  Vector b;
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

using Shape = std::variant<Box, Polytope, Ball>;

/// Compact convex region of a carrier subspace. Shapes are expressed in the
/// coordinates of the carrier's orthonormal basis.
class FeasibleSet {
public:
  FeasibleSet() = default;
  /// Validates compactness and nonemptiness; throws ValidationError.
  FeasibleSet(Subspace carrier, Shape shape);

  const Subspace& carrier() const { return carrier_; }
  const Shape& shape() const { return shape_; }
  std::size_t dim() const { return carrier_.dim(); }

  bool is_box() const { return std::holds_alternative<Box>(shape_); }
  bool is_polytope() const { return std::holds_alternative<Polytope>(shape_); }
  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }

  Vector to_ambient(const Vector& t) const { return carrier_.basis() * t; }
  Vector to_local(const Vector& x) const { return carrier_.basis().transpose() * x; }

  bool contains_local(const Vector& t, double tol = kFeasibilityTol) const;
  /// Membership of an ambient point (must also lie in the carrier).
  bool contains(const Vector& x, double tol = kFeasibilityTol) const;

  /// Halfspace form; Box converts exactly, Ball throws.
  Polytope as_polytope() const;
  /// Vertices in carrier coordinates (Box/Polytope only).
  std::vector<Vector> vertices_local() const;
  /// Axis-aligned bounds in carrier coordinates.
  std::pair<Vector, Vector> bounds_local() const;
  /// max over the set of dir . x, for an ambient direction.
  double support(const Vector& dir) const;
  /// The unique nearest point of the set to t (carrier coordinates).
  Vector nearest_local(const Vector& t) const;
  /// Some point of the set, in ambient coordinates.
  Vector representative() const;

  /// this ∩ s, carried by carrier() ∩ s; nullopt if empty.
  std::optional<FeasibleSet> section(const Subspace& s) const;

private:
  Subspace carrier_;
  Shape shape_;
};

/// Intersection of two feasible sets. Polyhedral pairs are exact; a ball is
/// supported only when one set contains the other. nullopt when empty.
std::optional<FeasibleSet> intersect_feasible(const FeasibleSet& a, const FeasibleSet& b);

/// a ⊆ b, exact for Box/Ball and by vertices for polytopes.
bool feasible_contains(const FeasibleSet& outer, const FeasibleSet& inner, double tol = kFeasibilityTol);

/// Points of F closest to the projection of x onto F's carrier, in ambient
/// coordinates, lexicographically ordered. For convex F this is a single point.
std::vector<Vector> gamma(const Vector& x, const FeasibleSet& f);

/// Lexicographic order on vectors; ties within tol compare equal.
bool lex_less(const Vector& a, const Vector& b, double tol = 0.0);

}  // namespace lgo
