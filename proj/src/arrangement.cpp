#include "lgo/arrangement.hpp"

#include "lgo/errors.hpp"

#include <algorithm>
#include <sstream>

namespace lgo {

namespace {

constexpr double kSameSubspaceTol = 1e-9;

nlohmann::json subspace_json(const Subspace& s) {
  nlohmann::json gens = nlohmann::json::array();
  const QMatrix& g = s.generators();
  for (std::size_t c = 0; c < g.cols(); ++c) {
    nlohmann::json col = nlohmann::json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) col.push_back(to_string(g(r, c)));
    gens.push_back(std::move(col));
  }
  return gens;
}

}  // namespace

std::string to_string(ClassKind k) {
  switch (k) {
    case ClassKind::pure: return "pure";
    case ClassKind::intersection: return "intersection";
    case ClassKind::complement: return "complement";
  }
  return "unknown";
}

Partition build_partition(const std::vector<Subspace>& subspaces) {
  if (subspaces.empty() || subspaces.size() > 12)
    throw ValidationError("build_partition: between 1 and 12 subspaces are supported");
  Partition p;
  p.ambient_dim = subspaces.front().ambient_dim();
  p.subspaces = subspaces;
  for (const auto& s : subspaces)
    if (s.ambient_dim() != p.ambient_dim) throw ValidationError("build_partition: dimension mismatch");

  std::vector<Subspace> flats;
  auto find = [&flats](const Subspace& s) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < flats.size(); ++i)
      if (flats[i].same_as(s, kSameSubspaceTol)) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  for (std::size_t k = 0; k < subspaces.size(); ++k) {
    const auto at = find(subspaces[k]);
    if (at >= 0) {
      p.warnings.push_back("subspace " + std::to_string(k) + " duplicates an earlier subspace");
      continue;
    }
    flats.push_back(subspaces[k]);
  }
  const std::size_t pure_count = flats.size();
  for (std::size_t i = 0; i < flats.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Subspace s = intersect_subspaces({flats[i], flats[j]});
      if (find(s) < 0) flats.push_back(std::move(s));
    }

  for (std::size_t f = 0; f < flats.size(); ++f) {
    PartitionClass c;
    c.carrier = flats[f];
    for (std::size_t k = 0; k < subspaces.size(); ++k) {
      if (subspaces[k].contains(flats[f], kSameSubspaceTol)) c.label.push_back(k);
      if (subspaces[k].same_as(flats[f], kSameSubspaceTol)) c.owners.push_back(k);
    }
    c.kind = f < pure_count ? ClassKind::pure : ClassKind::intersection;
    p.classes.push_back(std::move(c));
  }
  std::stable_sort(p.classes.begin() + static_cast<std::ptrdiff_t>(pure_count), p.classes.end(),
                   [](const PartitionClass& a, const PartitionClass& b) {
                     if (a.carrier.dim() != b.carrier.dim()) return a.carrier.dim() > b.carrier.dim();
                     return a.label < b.label;
                   });
  if (find(Subspace::full(p.ambient_dim)) < 0) {
    PartitionClass alpha;
    alpha.carrier = Subspace::full(p.ambient_dim);
    alpha.kind = ClassKind::complement;
    p.classes.push_back(std::move(alpha));
  }
  return p;
}

std::size_t class_of(const Vector& x, const Partition& partition, double tol) {
  std::size_t best = partition.size();
  for (std::size_t c = 0; c < partition.size(); ++c) {
    const Subspace& s = partition.classes[c].carrier;
    if (!s.contains(x, tol)) continue;
    if (best == partition.size() || s.dim() < partition.classes[best].carrier.dim()) best = c;
  }
  if (best == partition.size()) throw ValidationError("class_of: point lies in no class");
  return best;
}

bool strictly_below(const Partition& p, std::size_t lower, std::size_t upper) {
  const Subspace& lo = p.classes[lower].carrier;
  const Subspace& hi = p.classes[upper].carrier;
  return lo.dim() < hi.dim() && hi.contains(lo, kSameSubspaceTol);
}

IncidenceMatrix build_incidence(const Partition& partition) {
  IncidenceMatrix t;
  t.classes = partition.size();
  const std::size_t n = partition.size();
  for (std::size_t hi = 0; hi < n; ++hi)
    for (std::size_t lo = 0; lo < n; ++lo) {
      if (!strictly_below(partition, lo, hi)) continue;
      bool immediate = true;
      for (std::size_t mid = 0; mid < n && immediate; ++mid)
        if (strictly_below(partition, lo, mid) && strictly_below(partition, mid, hi)) immediate = false;
      if (immediate) t.rows.push_back({hi, lo, partition.classes[lo].carrier});
    }
  return t;
}

std::vector<std::size_t> children(const IncidenceMatrix& t, std::size_t c) {
  std::vector<std::size_t> out;
  for (const auto& r : t.rows)
    if (r.hi == c) out.push_back(r.lo);
  return out;
}

std::vector<std::vector<int>> IncidenceMatrix::dense() const {
  std::vector<std::vector<int>> m(rows.size(), std::vector<int>(classes, 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m[i][rows[i].hi] = 1;
    m[i][rows[i].lo] = -1;
  }
  return m;
}

std::string IncidenceMatrix::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < classes; ++c) out << (c ? "," : "") << "class" << c;
  out << '\n';
  for (const auto& row : dense()) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const Partition& p) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : p.classes)
    classes.push_back({{"label", c.label},
                       {"owners", c.owners},
                       {"kind", to_string(c.kind)},
                       {"dim", c.carrier.dim()},
                       {"generators", subspace_json(c.carrier)}});
  return {{"lambda", p.size()}, {"classes", classes}, {"warnings", p.warnings}};
}

nlohmann::json to_json(const IncidenceMatrix& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) rows.push_back({{"hi", r.hi}, {"lo", r.lo}, {"boundary_dim", r.boundary.dim()}});
  return {{"tau", t.size()}, {"rows", rows}, {"entries", t.dense()}};
}

}  // namespace lgo
