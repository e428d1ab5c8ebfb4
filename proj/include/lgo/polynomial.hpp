#pragma once

#include "lgo/exact_linalg.hpp"
#include "lgo/rational.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <climits>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace lgo {

class Subspace;

/// Dense exponent vector, one entry per variable.
using Monomial = std::vector<int>;

/// Degree reported for the zero polynomial.
inline constexpr int kZeroPolyDegree = INT_MIN;

int total_degree(const Monomial& m);

/// Graded reverse lexicographic comparison: true when a < b.
bool grevlex_less(const Monomial& a, const Monomial& b);

/// Orders terms from largest to smallest, so the leading term comes first.
struct GrevlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_less(b, a); }
};

/// All monomials in `nvars` variables of total degree <= `degree`, in
/// ascending grevlex order (constant first).
std::vector<Monomial> monomials_up_to(std::size_t nvars, int degree);

inline bool coeff_is_zero(const Rational& c) { return sgn(c) == 0; }
inline bool coeff_is_zero(double c) { return c == 0.0; }

/// Sparse multivariate polynomial. Coefficients are either exact rationals
/// or doubles; the two backends only meet through explicit conversion.
template <class Coeff>
class BasicPoly {
public:
  using coeff_type = Coeff;
  using Terms = std::map<Monomial, Coeff, GrevlexGreater>;

  explicit BasicPoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static BasicPoly constant(std::size_t nvars, const Coeff& c) {
    BasicPoly p(nvars);
    p.add_term(Monomial(nvars, 0), c);
    return p;
  }

  static BasicPoly variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw std::out_of_range("variable index");
    Monomial m(nvars, 0);
    m[index] = 1;
    BasicPoly p(nvars);
    p.add_term(m, Coeff(1));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const Coeff& c) {
    if (m.size() != nvars_) throw std::invalid_argument("monomial arity does not match polynomial");
    for (int e : m)
      if (e < 0) throw std::invalid_argument("negative exponent");
    if (coeff_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  Coeff coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  int degree() const {
    if (terms_.empty()) return kZeroPolyDegree;
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
    return d;
  }

  BasicPoly& operator+=(const BasicPoly& rhs) {
    check_arity(rhs);
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
  }

  BasicPoly& operator-=(const BasicPoly& rhs) {
    check_arity(rhs);
    for (const auto& [m, c] : rhs.terms_) add_term(m, Coeff(-c));
    return *this;
  }

  BasicPoly& operator*=(const Coeff& s) {
    if (coeff_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend BasicPoly operator+(BasicPoly a, const BasicPoly& b) { return a += b; }
  friend BasicPoly operator-(BasicPoly a, const BasicPoly& b) { return a -= b; }
  friend BasicPoly operator*(BasicPoly a, const Coeff& s) { return a *= s; }
  friend BasicPoly operator*(const Coeff& s, BasicPoly a) { return a *= s; }
  BasicPoly operator-() const { return BasicPoly(*this) *= Coeff(-1); }

  friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
    a.check_arity(b);
    BasicPoly out(a.nvars_);
    Monomial m(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
        out.add_term(m, Coeff(ca * cb));
      }
    return out;
  }

  /// Multiplies by a monomial.
  BasicPoly shifted(const Monomial& by) const {
    if (by.size() != nvars_) throw std::invalid_argument("monomial arity does not match polynomial");
    BasicPoly out(nvars_);
    for (const auto& [m, c] : terms_) {
      Monomial s = m;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += by[i];
      out.terms_.emplace_hint(out.terms_.end(), std::move(s), c);
    }
    return out;
  }

  friend bool operator==(const BasicPoly& a, const BasicPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Drops coefficients with |c| <= tol (float backend housekeeping).
  void prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(to_scalar(it->second)) <= tol)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(to_scalar(c)));
    return m;
  }

private:
  static double to_scalar(const Rational& c) { return c.get_d(); }
  static double to_scalar(double c) { return c; }

  void check_arity(const BasicPoly& rhs) const {
    if (rhs.nvars_ != nvars_) throw std::invalid_argument("polynomial arity mismatch");
  }

  std::size_t nvars_;
  Terms terms_;
};

using QPoly = BasicPoly<Rational>;
using RPoly = BasicPoly<double>;

/// Lossy conversion to the float backend.
RPoly to_float(const QPoly& p);
/// Exact conversion of every double coefficient.
QPoly to_rational(const RPoly& p);

Rational eval(const QPoly& p, const std::vector<Rational>& x);
double eval(const QPoly& p, const Eigen::VectorXd& x);
double eval(const RPoly& p, const Eigen::VectorXd& x);

/// Substitutes x = M s, where M has one row per variable of p.
QPoly substitute(const QPoly& p, const QMatrix& m);
RPoly substitute(const RPoly& p, const Eigen::MatrixXd& m);

/// Restriction to a subspace. The rational backend expands in the exact
/// generator coordinates of S; the float backend in its orthonormal basis.
QPoly restrict(const QPoly& p, const Subspace& s);
RPoly restrict(const RPoly& p, const Subspace& s);

std::vector<QPoly> gradient(const QPoly& p);
std::vector<RPoly> gradient(const RPoly& p);

bool poly_equal(const QPoly& p, const QPoly& q);
bool poly_equal(const RPoly& p, const RPoly& q, double tol);

/// Polynomial translated so that p_new(x) = p(x + shift).
RPoly translate(const RPoly& p, const Eigen::VectorXd& shift);

/// Coefficient vector over the given monomial list; throws if p has a
/// term outside it.
std::vector<Rational> coefficients(const QPoly& p, const std::vector<Monomial>& basis);
Eigen::VectorXd coefficients(const RPoly& p, const std::vector<Monomial>& basis);
RPoly from_coefficients(std::size_t nvars, const std::vector<Monomial>& basis, const Eigen::VectorXd& c);

nlohmann::json to_json(const QPoly& p);
nlohmann::json to_json(const RPoly& p);
QPoly qpoly_from_json(const nlohmann::json& j, std::size_t nvars);
RPoly rpoly_from_json(const nlohmann::json& j, std::size_t nvars);

}  // namespace lgo
