#include "lgo/exact_linalg.hpp"

#include <stdexcept>

namespace lgo {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.front() == ' ')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const bool decimal = s.find_first_of(".eE") != std::string::npos;
  if (decimal) {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad rational literal: " + s);
    return Rational(v);
  }
  Rational q;
  if (!s.empty() && s.front() == '+') s.erase(s.begin());
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_double(const Eigen::MatrixXd& src) {
  QMatrix m(static_cast<std::size_t>(src.rows()), static_cast<std::size_t>(src.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = Rational(src(r, c));
  return m;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

QMatrix QMatrix::operator*(const QMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("QMatrix product: shape mismatch");
  QMatrix out(rows_, rhs.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (sgn(a) == 0) continue;
      for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
    }
  return out;
}

bool QMatrix::operator==(const QMatrix& rhs) const {
  return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

QMatrix QMatrix::cols_range(std::size_t first, std::size_t count) const {
  QMatrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, first + c);
  return out;
}

QMatrix QMatrix::hcat(const QMatrix& rhs) const {
  if (rows_ != rhs.rows_ && cols_ != 0 && rhs.cols_ != 0)
    throw std::invalid_argument("QMatrix hcat: row mismatch");
  const std::size_t rows = cols_ == 0 ? rhs.rows_ : rows_;
  QMatrix out(rows, cols_ + rhs.cols_);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c);
    for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, cols_ + c) = rhs(r, c);
  }
  return out;
}

QMatrix QMatrix::vcat(const QMatrix& rhs) const {
  if (cols_ != rhs.cols_ && rows_ != 0 && rhs.rows_ != 0)
    throw std::invalid_argument("QMatrix vcat: column mismatch");
  const std::size_t cols = rows_ == 0 ? rhs.cols_ : cols_;
  QMatrix out(rows_ + rhs.rows_, cols);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = (*this)(r, c);
  for (std::size_t r = 0; r < rhs.rows_; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(rows_ + r, c) = rhs(r, c);
  return out;
}

bool QMatrix::is_zero() const {
  for (const auto& q : data_)
    if (sgn(q) != 0) return false;
  return true;
}

Eigen::MatrixXd QMatrix::to_double() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).get_d();
  return m;
}

EchelonForm rref(QMatrix m) {
  EchelonForm out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && sgn(m(pivot, col)) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
    const Rational inv = 1 / m(row, col);
    for (std::size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || sgn(m(r, col)) == 0) continue;
      const Rational f = m(r, col);
      for (std::size_t c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

QMatrix nullspace(const QMatrix& m) {
  const EchelonForm ef = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : ef.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  QMatrix basis(m.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t f = free_cols[k];
    basis(f, k) = 1;
    for (std::size_t r = 0; r < ef.pivots.size(); ++r) basis(ef.pivots[r], k) = -ef.reduced(r, f);
  }
  return basis;
}

QMatrix column_basis(const QMatrix& m) {
  const EchelonForm ef = rref(m);
  QMatrix out(m.rows(), ef.pivots.size());
  for (std::size_t k = 0; k < ef.pivots.size(); ++k)
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, k) = m(r, ef.pivots[k]);
  return out;
}

Eigen::MatrixXd float_nullspace(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  const double scale = s.size() > 0 ? std::max(1.0, s(0)) : 1.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

}  // namespace lgo
