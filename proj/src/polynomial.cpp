#include "lgo/polynomial.hpp"

#include "lgo/errors.hpp"
#include "lgo/space.hpp"

#include <algorithm>
#include <numeric>

namespace lgo {

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool grevlex_less(const Monomial& a, const Monomial& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  // Equal degree: the larger monomial has the smaller exponent in the last
  // variable where they differ.
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::vector<Monomial> monomials_up_to(std::size_t nvars, int degree) {
  std::vector<Monomial> out;
  if (degree < 0) return out;
  Monomial m(nvars, 0);
  // Enumerate exponent vectors with sum <= degree recursively.
  auto rec = [&](auto&& self, std::size_t var, int left) -> void {
    if (var == nvars) {
      out.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      m[var] = e;
      self(self, var + 1, left - e);
    }
    m[var] = 0;
  };
  rec(rec, 0, degree);
  std::sort(out.begin(), out.end(), grevlex_less);
  return out;
}

RPoly to_float(const QPoly& p) {
  RPoly out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, c.get_d());
  return out;
}

QPoly to_rational(const RPoly& p) {
  QPoly out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, Rational(c));
  return out;
}

Rational eval(const QPoly& p, const std::vector<Rational>& x) {
  if (x.size() != p.nvars()) throw ValidationError("eval: dimension mismatch");
  Rational sum = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational term = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int e = 0; e < m[i]; ++e) term *= x[i];
    sum += term;
  }
  return sum;
}

namespace {

template <class Poly>
double eval_float(const Poly& p, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != p.nvars()) throw ValidationError("eval: dimension mismatch");
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int e = 0; e < m[i]; ++e) term *= x(static_cast<Eigen::Index>(i));
    if constexpr (std::is_same_v<typename Poly::coeff_type, Rational>)
      sum += c.get_d() * term;
    else
      sum += c * term;
  }
  return sum;
}

// Expands p(M s) by multiplying out powers of the linear forms M_i . s.
template <class Poly, class Entry>
Poly substitute_impl(const Poly& p, std::size_t rows, std::size_t cols, Entry&& entry) {
  using C = typename Poly::coeff_type;
  if (rows != p.nvars()) throw ValidationError("substitute: matrix rows must match polynomial arity");
  const int deg = std::max(0, p.degree());
  std::vector<std::vector<Poly>> powers(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    Poly form(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      Monomial m(cols, 0);
      m[j] = 1;
      form.add_term(m, entry(i, j));
    }
    powers[i].push_back(Poly::constant(cols, C(1)));
    for (int e = 1; e <= deg; ++e) powers[i].push_back(powers[i].back() * form);
  }
  Poly out(cols);
  for (const auto& [m, c] : p.terms()) {
    Poly term = Poly::constant(cols, c);
    for (std::size_t i = 0; i < rows; ++i)
      if (m[i] > 0) term = term * powers[i][static_cast<std::size_t>(m[i])];
    out += term;
  }
  return out;
}

template <class Poly>
std::vector<Poly> gradient_impl(const Poly& p) {
  using C = typename Poly::coeff_type;
  std::vector<Poly> out(p.nvars(), Poly(p.nvars()));
  for (const auto& [m, c] : p.terms())
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      Monomial d = m;
      --d[i];
      out[i].add_term(d, C(c * C(m[i])));
    }
  return out;
}

}  // namespace

double eval(const QPoly& p, const Eigen::VectorXd& x) { return eval_float(p, x); }
double eval(const RPoly& p, const Eigen::VectorXd& x) { return eval_float(p, x); }

QPoly substitute(const QPoly& p, const QMatrix& m) {
  return substitute_impl(p, m.rows(), m.cols(), [&](std::size_t i, std::size_t j) { return m(i, j); });
}

RPoly substitute(const RPoly& p, const Eigen::MatrixXd& m) {
  return substitute_impl(p, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                         [&](std::size_t i, std::size_t j) {
                           return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                         });
}

QPoly restrict(const QPoly& p, const Subspace& s) { return substitute(p, s.generators()); }
RPoly restrict(const RPoly& p, const Subspace& s) {
  RPoly out = substitute(p, s.basis());
  out.prune(1e-12 * std::max(1.0, p.max_abs_coeff()));
  return out;
}

std::vector<QPoly> gradient(const QPoly& p) { return gradient_impl(p); }
std::vector<RPoly> gradient(const RPoly& p) { return gradient_impl(p); }

bool poly_equal(const QPoly& p, const QPoly& q) {
  if (p.nvars() != q.nvars()) throw ValidationError("poly_equal: arity mismatch");
  return p == q;
}

bool poly_equal(const RPoly& p, const RPoly& q, double tol) {
  if (p.nvars() != q.nvars()) throw ValidationError("poly_equal: arity mismatch");
  const RPoly d = p - q;
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

RPoly translate(const RPoly& p, const Eigen::VectorXd& shift) {
  const std::size_t n = p.nvars();
  if (static_cast<std::size_t>(shift.size()) != n) throw ValidationError("translate: dimension mismatch");
  const int deg = std::max(0, p.degree());
  std::vector<std::vector<RPoly>> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RPoly lin = RPoly::variable(n, i) + RPoly::constant(n, shift(static_cast<Eigen::Index>(i)));
    powers[i].push_back(RPoly::constant(n, 1.0));
    for (int e = 1; e <= deg; ++e) powers[i].push_back(powers[i].back() * lin);
  }
  RPoly out(n);
  for (const auto& [m, c] : p.terms()) {
    RPoly term = RPoly::constant(n, c);
    for (std::size_t i = 0; i < n; ++i)
      if (m[i] > 0) term = term * powers[i][static_cast<std::size_t>(m[i])];
    out += term;
  }
  return out;
}

std::vector<Rational> coefficients(const QPoly& p, const std::vector<Monomial>& basis) {
  std::vector<Rational> out(basis.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[i] = p.coeff(basis[i]);
    if (sgn(out[i]) != 0) ++found;
  }
  if (found != p.size()) throw ValidationError("polynomial has terms outside the monomial basis");
  return out;
}

Eigen::VectorXd coefficients(const RPoly& p, const std::vector<Monomial>& basis) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.size()));
  std::size_t found = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = p.coeff(basis[i]);
    if (out(static_cast<Eigen::Index>(i)) != 0.0) ++found;
  }
  if (found != p.size()) throw ValidationError("polynomial has terms outside the monomial basis");
  return out;
}

RPoly from_coefficients(std::size_t nvars, const std::vector<Monomial>& basis, const Eigen::VectorXd& c) {
  RPoly p(nvars);
  for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], c(static_cast<Eigen::Index>(i)));
  return p;
}

namespace {

// Terms are written in ascending grevlex order.
template <class Poly, class Write>
nlohmann::json poly_to_json(const Poly& p, Write&& write) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    nlohmann::json t;
    t["exponents"] = it->first;
    t["coeff"] = write(it->second);
    arr.push_back(std::move(t));
  }
  return arr;
}

template <class Poly, class Read>
Poly poly_from_json(const nlohmann::json& j, std::size_t nvars, Read&& read) {
  if (!j.is_array()) throw ValidationError("polynomial: expected an array of terms");
  Poly p(nvars);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& t = j[i];
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff"))
      throw ValidationError("polynomial term " + std::to_string(i) + ": needs 'exponents' and 'coeff'");
    const auto& e = t["exponents"];
    if (!e.is_array() || e.size() != nvars)
      throw ValidationError("polynomial term " + std::to_string(i) + ": exponents must have " +
                            std::to_string(nvars) + " entries");
    Monomial m;
    for (const auto& x : e) {
      if (!x.is_number_integer() || x.get<int>() < 0)
        throw ValidationError("polynomial term " + std::to_string(i) + ": exponents must be non-negative integers");
      m.push_back(x.get<int>());
    }
    p.add_term(m, read(t["coeff"], i));
  }
  return p;
}

Rational read_rational(const nlohmann::json& c, std::size_t i) {
  try {
    if (c.is_string()) return parse_rational(c.get<std::string>());
    if (c.is_number_integer()) return Rational(c.get<long>(), 1);
    if (c.is_number()) return Rational(c.get<double>());
  } catch (const std::exception& e) {
    throw ValidationError("polynomial term " + std::to_string(i) + ": " + e.what());
  }
  throw ValidationError("polynomial term " + std::to_string(i) + ": coeff must be a number or \"num/den\"");
}

}  // namespace

nlohmann::json to_json(const QPoly& p) {
  return poly_to_json(p, [](const Rational& c) { return to_string(c); });
}

nlohmann::json to_json(const RPoly& p) {
  return poly_to_json(p, [](double c) { return c; });
}

QPoly qpoly_from_json(const nlohmann::json& j, std::size_t nvars) {
  return poly_from_json<QPoly>(j, nvars, read_rational);
}

RPoly rpoly_from_json(const nlohmann::json& j, std::size_t nvars) {
  return poly_from_json<RPoly>(j, nvars, [](const nlohmann::json& c, std::size_t i) {
    return read_rational(c, i).get_d();
  });
}

}  // namespace lgo
