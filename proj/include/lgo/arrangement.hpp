#pragma once

#include "lgo/space.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lgo {

enum class ClassKind { pure, intersection, complement };

std::string to_string(ClassKind k);

/// One flat of the intersection lattice. Its class is the set of points whose
/// smallest containing flat is this one.
struct PartitionClass {
  std::vector<std::size_t> label;   // subspaces containing the flat; empty for the complement
  std::vector<std::size_t> owners;  // subspaces equal to the flat
  Subspace carrier;
  ClassKind kind = ClassKind::pure;
};

struct Partition {
  std::size_t ambient_dim = 0;
  std::vector<Subspace> subspaces;
  std::vector<PartitionClass> classes;
  std::vector<std::string> warnings;

  std::size_t size() const { return classes.size(); }
};

/// Flats of the arrangement: the subspaces closed under intersection, plus
/// the whole space as complement when no subspace is the whole space.
/// Order: pure classes by first owner, intersections by decreasing
/// dimension, the complement last.
Partition build_partition(const std::vector<Subspace>& subspaces);

/// Index of the class of x: the smallest flat containing it.
std::size_t class_of(const Vector& x, const Partition& partition, double tol = kFeasibilityTol);

/// Whether flat `lower` is strictly inside flat `upper`.
bool strictly_below(const Partition& p, std::size_t lower, std::size_t upper);

struct IncidenceRow {
  std::size_t hi = 0;  // +1
  std::size_t lo = 0;  // -1; its carrier is the boundary
  Subspace boundary;
};

struct IncidenceMatrix {
  std::size_t classes = 0;
  std::vector<IncidenceRow> rows;

  std::size_t size() const { return rows.size(); }
  std::vector<std::vector<int>> dense() const;
  std::string to_csv() const;
};

/// One row per pair of flats in immediate containment.
IncidenceMatrix build_incidence(const Partition& partition);

/// Flats immediately below class c.
std::vector<std::size_t> children(const IncidenceMatrix& t, std::size_t c);

nlohmann::json to_json(const Partition& p);
nlohmann::json to_json(const IncidenceMatrix& t);

}  // namespace lgo
