#include "lgo/groebner.hpp"

#include <algorithm>
#include <tuple>

namespace lgo {

namespace {

bool divides(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Monomial quotient(const Monomial& b, const Monomial& a) {
  Monomial q(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) q[i] = b[i] - a[i];
  return q;
}

Monomial lcm(const Monomial& a, const Monomial& b) {
  Monomial l(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) l[i] = std::max(a[i], b[i]);
  return l;
}

ModuleElement monic(ModuleElement e, const ModuleOrder& ord) {
  const Rational lc = leading_term(e, ord).coeff;
  if (lc == 1) return e;
  const Rational inv = 1 / lc;
  for (std::size_t i = 0; i < e.rank(); ++i) e[i] *= inv;
  return e;
}

}  // namespace

ModuleElement::ModuleElement(std::size_t rank, std::size_t nvars) : nvars_(nvars), components_(rank, QPoly(nvars)) {}

ModuleElement::ModuleElement(std::vector<QPoly> components) : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("module element: rank must be >= 1");
  nvars_ = components_.front().nvars();
  for (const auto& c : components_)
    if (c.nvars() != nvars_) throw ValidationError("module element: components use different variables");
}

bool ModuleElement::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](const QPoly& p) { return p.is_zero(); });
}

int ModuleElement::degree() const {
  int d = kZeroPolyDegree;
  for (const auto& c : components_) d = std::max(d, c.degree());
  return d;
}

void ModuleElement::add_multiple(const Rational& c, const Monomial& m, const ModuleElement& g) {
  Monomial s(nvars_);
  for (std::size_t i = 0; i < components_.size(); ++i)
    for (const auto& [gm, gc] : g.components_[i].terms()) {
      for (std::size_t v = 0; v < nvars_; ++v) s[v] = gm[v] + m[v];
      components_[i].add_term(s, c * gc);
    }
}

ModuleElement ModuleElement::times(const QPoly& p) const {
  ModuleElement out(*this);
  for (auto& c : out.components_) c = c * p;
  return out;
}

bool term_less(std::size_t pa, const Monomial& ma, std::size_t pb, const Monomial& mb, const ModuleOrder& ord) {
  if (ord.rule == PositionRule::pot) {
    if (pa != pb) return pa > pb;
    return grevlex_less(ma, mb);
  }
  if (ma != mb) return grevlex_less(ma, mb);
  return pa > pb;
}

ModuleTerm leading_term(const ModuleElement& e, const ModuleOrder& ord) {
  bool found = false;
  ModuleTerm best;
  for (std::size_t i = 0; i < e.rank(); ++i) {
    if (e[i].is_zero()) continue;
    const auto& [m, c] = *e[i].terms().begin();
    if (!found || term_less(best.position, best.monomial, i, m, ord)) {
      best = {i, m, c};
      found = true;
    }
  }
  if (!found) throw ValidationError("leading_term: zero element");
  return best;
}

ModuleElement reduce(const ModuleElement& e, const std::vector<ModuleElement>& g, const ModuleOrder& ord) {
  std::vector<ModuleTerm> leads;
  for (const auto& h : g) leads.push_back(h.is_zero() ? ModuleTerm{} : leading_term(h, ord));
  ModuleElement p = e;
  ModuleElement r(e.rank(), e.nvars());
  while (!p.is_zero()) {
    const ModuleTerm lt = leading_term(p, ord);
    bool divided = false;
    for (std::size_t k = 0; k < g.size() && !divided; ++k) {
      if (g[k].is_zero() || leads[k].position != lt.position || !divides(leads[k].monomial, lt.monomial)) continue;
      p.add_multiple(-lt.coeff / leads[k].coeff, quotient(lt.monomial, leads[k].monomial), g[k]);
      divided = true;
    }
    if (!divided) {
      r[lt.position].add_term(lt.monomial, lt.coeff);
      p[lt.position].add_term(lt.monomial, -lt.coeff);
    }
  }
  return r;
}

ModuleElement s_vector(const ModuleElement& f, const ModuleElement& g, const ModuleOrder& ord) {
  const ModuleTerm a = leading_term(f, ord);
  const ModuleTerm b = leading_term(g, ord);
  ModuleElement s(f.rank(), f.nvars());
  if (a.position != b.position) return s;
  const Monomial l = lcm(a.monomial, b.monomial);
  s.add_multiple(1 / a.coeff, quotient(l, a.monomial), f);
  s.add_multiple(-1 / b.coeff, quotient(l, b.monomial), g);
  return s;
}

std::vector<ModuleElement> buchberger(const std::vector<ModuleElement>& generators, const ModuleOrder& ord,
                                      const BuchbergerLimits& limits) {
  std::vector<ModuleElement> basis;
  for (const auto& g : generators) {
    if (!basis.empty() && (g.rank() != basis.front().rank() || g.nvars() != basis.front().nvars()))
      throw ValidationError("buchberger: generators of different shapes");
    if (!g.is_zero()) basis.push_back(monic(g, ord));
  }
  if (basis.empty()) return basis;

  using Pair = std::tuple<int, std::size_t, std::size_t>;  // lcm degree, j, i
  std::vector<Pair> pairs;
  auto add_pairs = [&](std::size_t j) {
    const ModuleTerm b = leading_term(basis[j], ord);
    for (std::size_t i = 0; i < j; ++i) {
      const ModuleTerm a = leading_term(basis[i], ord);
      if (a.position != b.position) continue;
      pairs.emplace_back(total_degree(lcm(a.monomial, b.monomial)), j, i);
    }
  };
  for (std::size_t j = 1; j < basis.size(); ++j) add_pairs(j);

  std::size_t processed = 0;
  while (!pairs.empty()) {
    const auto it = std::min_element(pairs.begin(), pairs.end());
    const auto [deg, j, i] = *it;
    pairs.erase(it);
    if (++processed > limits.max_pairs) throw BuchbergerCapError("buchberger: pair limit exceeded", basis);
    const ModuleElement h = reduce(s_vector(basis[i], basis[j], ord), basis, ord);
    if (h.is_zero()) continue;
    if (h.degree() > limits.max_degree) throw BuchbergerCapError("buchberger: degree limit exceeded", basis);
    if (basis.size() >= limits.max_basis) throw BuchbergerCapError("buchberger: basis size limit exceeded", basis);
    basis.push_back(monic(h, ord));
    add_pairs(basis.size() - 1);
  }

  // Minimal basis: drop elements whose leading term another one divides.
  std::vector<ModuleTerm> leads;
  for (const auto& g : basis) leads.push_back(leading_term(g, ord));
  std::vector<ModuleElement> minimal;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    bool redundant = false;
    for (std::size_t b = 0; b < basis.size() && !redundant; ++b) {
      if (a == b || leads[a].position != leads[b].position || !divides(leads[b].monomial, leads[a].monomial)) continue;
      redundant = leads[a].monomial != leads[b].monomial || b < a;
    }
    if (!redundant) minimal.push_back(basis[a]);
  }
  for (std::size_t a = 0; a < minimal.size(); ++a) {
    std::vector<ModuleElement> others;
    for (std::size_t b = 0; b < minimal.size(); ++b)
      if (b != a) others.push_back(minimal[b]);
    // Keep the leading term, reduce the tail.
    const ModuleTerm lt = leading_term(minimal[a], ord);
    ModuleElement tail = minimal[a];
    tail[lt.position].add_term(lt.monomial, -lt.coeff);
    ModuleElement r = reduce(tail, others, ord);
    r[lt.position].add_term(lt.monomial, lt.coeff);
    minimal[a] = monic(r, ord);
  }
  std::sort(minimal.begin(), minimal.end(), [&ord](const ModuleElement& a, const ModuleElement& b) {
    const ModuleTerm ta = leading_term(a, ord);
    const ModuleTerm tb = leading_term(b, ord);
    return term_less(ta.position, ta.monomial, tb.position, tb.monomial, ord);
  });
  return minimal;
}

std::vector<TRow> t_rows(const IncidenceMatrix& t) {
  std::vector<TRow> rows;
  for (const auto& r : t.rows) rows.push_back({{{r.hi, 1}, {r.lo, -1}}, r.boundary});
  return rows;
}

std::vector<QPoly> apply_T(const ModuleElement& f, const std::vector<TRow>& rows) {
  std::vector<QPoly> out;
  for (const auto& row : rows) {
    QPoly sum(f.nvars());
    for (const auto& [c, sign] : row.entries) sum += f[c] * Rational(sign);
    out.push_back(restrict(sum, row.carrier));
  }
  return out;
}

std::vector<ModuleElement> kernel_generators(std::size_t classes, std::size_t nvars, const std::vector<TRow>& rows,
                                             const BuchbergerLimits& limits) {
  if (classes == 0) throw ValidationError("kernel_generators: no classes");
  std::vector<ModuleElement> gens;
  const std::size_t tau = rows.size();
  if (tau == 0) {
    for (std::size_t c = 0; c < classes; ++c) {
      ModuleElement e(classes, nvars);
      e[c] = QPoly::constant(nvars, 1);
      gens.push_back(std::move(e));
    }
    return buchberger(gens, {PositionRule::top}, limits);
  }

  // Columns of M = [signs | -linear forms of each row's boundary ideal].
  std::vector<std::vector<QPoly>> columns;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<QPoly> col(tau, QPoly(nvars));
    for (std::size_t r = 0; r < tau; ++r)
      for (const auto& [cls, sign] : rows[r].entries)
        if (cls == c) col[r] += QPoly::constant(nvars, Rational(sign));
    columns.push_back(std::move(col));
  }
  for (std::size_t r = 0; r < tau; ++r) {
    const QMatrix forms = rows[r].carrier.constraint_rows();
    for (std::size_t k = 0; k < forms.rows(); ++k) {
      std::vector<QPoly> col(tau, QPoly(nvars));
      for (std::size_t v = 0; v < nvars; ++v) col[r] += QPoly::variable(nvars, v) * Rational(-forms(k, v));
      columns.push_back(std::move(col));
    }
  }

  // Graph module: (column j, e_j). Row positions come first under POT, so
  // basis elements with a zero row part generate the syzygies.
  const std::size_t width = columns.size();
  std::vector<ModuleElement> graph;
  for (std::size_t j = 0; j < width; ++j) {
    ModuleElement e(tau + width, nvars);
    for (std::size_t r = 0; r < tau; ++r) e[r] = columns[j][r];
    e[tau + j] = QPoly::constant(nvars, 1);
    graph.push_back(std::move(e));
  }
  for (const auto& g : buchberger(graph, {PositionRule::pot}, limits)) {
    bool syzygy = true;
    for (std::size_t r = 0; r < tau && syzygy; ++r) syzygy = g[r].is_zero();
    if (!syzygy) continue;
    ModuleElement f(classes, nvars);
    for (std::size_t c = 0; c < classes; ++c) f[c] = g[tau + c];
    if (!f.is_zero()) gens.push_back(std::move(f));
  }
  return buchberger(gens, {PositionRule::top}, limits);
}

QMatrix degree_slice(const std::vector<ModuleElement>& gens, std::size_t nvars, int r) {
  const auto monos = monomials_up_to(nvars, r);
  std::size_t classes = gens.empty() ? 0 : gens.front().rank();
  std::vector<std::vector<Rational>> cols;
  for (const auto& g : gens) {
    const int dg = g.degree();
    if (dg > r) continue;
    for (const auto& m : monomials_up_to(nvars, r - dg)) {
      ModuleElement mg(classes, nvars);
      mg.add_multiple(1, m, g);
      std::vector<Rational> col;
      col.reserve(classes * monos.size());
      for (std::size_t c = 0; c < classes; ++c) {
        const auto coeffs = coefficients(mg[c], monos);
        col.insert(col.end(), coeffs.begin(), coeffs.end());
      }
      cols.push_back(std::move(col));
    }
  }
  QMatrix out(classes * monos.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) out(i, j) = cols[j][i];
  return out;
}

nlohmann::json to_json(const ModuleElement& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t i = 0; i < e.rank(); ++i)
    for (auto t : to_json(e[i])) {
      t["position"] = i;
      terms.push_back(std::move(t));
    }
  return terms;
}

ModuleElement module_element_from_json(const nlohmann::json& j, std::size_t rank, std::size_t nvars) {
  if (!j.is_array()) throw ValidationError("module element: expected a list of terms");
  std::vector<nlohmann::json> parts(rank, nlohmann::json::array());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& t = j[i];
    if (!t.is_object() || !t.contains("position") || !t["position"].is_number_unsigned())
      throw ValidationError("module element term " + std::to_string(i) + ": missing or bad \"position\"");
    const auto pos = t["position"].get<std::size_t>();
    if (pos >= rank) throw ValidationError("module element term " + std::to_string(i) + ": position out of range");
    nlohmann::json rest = t;
    rest.erase("position");
    parts[pos].push_back(std::move(rest));
  }
  std::vector<QPoly> comps;
  for (const auto& p : parts) comps.push_back(qpoly_from_json(p, nvars));
  ModuleElement e(std::move(comps));
  return e;
}

}  // namespace lgo
