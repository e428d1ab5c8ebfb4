#pragma once

#include "lgo/arrangement.hpp"
#include "lgo/errors.hpp"
#include "lgo/polynomial.hpp"

#include <json.hpp>

#include <vector>

namespace lgo {

/// Position over term (compare positions first, lower index is larger) or
/// term over position. Monomials are compared in grevlex.
enum class PositionRule { pot, top };

struct ModuleOrder {
  PositionRule rule = PositionRule::pot;
};

struct ModuleTerm {
  std::size_t position = 0;
  Monomial monomial;
  Rational coeff;
};

/// Element of the free module P^rank over Q[x_1..x_nvars].
class ModuleElement {
public:
  ModuleElement() = default;
  ModuleElement(std::size_t rank, std::size_t nvars);
  explicit ModuleElement(std::vector<QPoly> components);

  std::size_t rank() const { return components_.size(); }
  std::size_t nvars() const { return nvars_; }
  const std::vector<QPoly>& components() const { return components_; }
  const QPoly& operator[](std::size_t i) const { return components_.at(i); }
  QPoly& operator[](std::size_t i) { return components_.at(i); }

  bool is_zero() const;
  int degree() const;

  /// this += c * x^m * g
  void add_multiple(const Rational& c, const Monomial& m, const ModuleElement& g);
  ModuleElement times(const QPoly& p) const;

  friend bool operator==(const ModuleElement& a, const ModuleElement& b) { return a.components_ == b.components_; }

private:
  std::size_t nvars_ = 0;
  std::vector<QPoly> components_;
};

/// true when (pa, ma) < (pb, mb) under the order.
bool term_less(std::size_t pa, const Monomial& ma, std::size_t pb, const Monomial& mb, const ModuleOrder& ord);

/// Throws ValidationError on the zero element.
ModuleTerm leading_term(const ModuleElement& e, const ModuleOrder& ord = {});

/// Full normal form: no term of the result is divisible by a leading term of
/// G at the same position.
ModuleElement reduce(const ModuleElement& e, const std::vector<ModuleElement>& g, const ModuleOrder& ord = {});

/// S-vector of f and g; zero when their leading positions differ.
ModuleElement s_vector(const ModuleElement& f, const ModuleElement& g, const ModuleOrder& ord = {});

struct BuchbergerLimits {
  std::size_t max_basis = 300;
  std::size_t max_pairs = 100000;
  int max_degree = 24;
};

class BuchbergerCapError : public ResourceCapError {
public:
  BuchbergerCapError(const std::string& what, std::vector<ModuleElement> partial)
      : ResourceCapError(what), partial_(std::move(partial)) {}
  const std::vector<ModuleElement>& partial() const { return partial_; }

private:
  std::vector<ModuleElement> partial_;
};

/// Reduced Groebner basis (monic, inter-reduced, sorted by leading term).
/// Pairs are processed by lowest lcm degree; pairs with different leading
/// positions are skipped.
std::vector<ModuleElement> buchberger(const std::vector<ModuleElement>& generators, const ModuleOrder& ord = {},
                                      const BuchbergerLimits& limits = {});

/// A row of the boundary operator: signed classes, restricted to a carrier.
struct TRow {
  std::vector<std::pair<std::size_t, int>> entries;
  Subspace carrier;
};

std::vector<TRow> t_rows(const IncidenceMatrix& t);

/// The row images of f: restrict(sum of sign * f_class, carrier).
std::vector<QPoly> apply_T(const ModuleElement& f, const std::vector<TRow>& rows);

/// Generators of {f in P^classes : T f = 0}, as a reduced Groebner basis in
/// term-over-position order (so degree slices are spanned by multiples).
/// Computed by eliminating the row positions from the graph module.
std::vector<ModuleElement> kernel_generators(std::size_t classes, std::size_t nvars, const std::vector<TRow>& rows,
                                             const BuchbergerLimits& limits = {});

/// Columns: coefficient vectors of every m * g with deg(m) + deg(g) <= r,
/// laid out class-major over monomials_up_to(nvars, r).
QMatrix degree_slice(const std::vector<ModuleElement>& gens, std::size_t nvars, int r);

nlohmann::json to_json(const ModuleElement& e);
ModuleElement module_element_from_json(const nlohmann::json& j, std::size_t rank, std::size_t nvars);

}  // namespace lgo
