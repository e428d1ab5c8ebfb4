#pragma once

#include "lgo/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace lgo {

/// Dense row-major matrix over the rationals.
class QMatrix {
public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n);
  static QMatrix from_double(const Eigen::MatrixXd& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  QMatrix transpose() const;
  QMatrix operator*(const QMatrix& rhs) const;
  bool operator==(const QMatrix& rhs) const;

  /// Columns [first, first+count).
  QMatrix cols_range(std::size_t first, std::size_t count) const;
  /// Horizontal concatenation.
  QMatrix hcat(const QMatrix& rhs) const;
  /// Vertical concatenation.
  QMatrix vcat(const QMatrix& rhs) const;

  bool is_zero() const;
  Eigen::MatrixXd to_double() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct EchelonForm {
  QMatrix reduced;                 // reduced row echelon form
  std::vector<std::size_t> pivots; // pivot column of each nonzero row
};

/// Gauss-Jordan elimination to reduced row echelon form.
EchelonForm rref(QMatrix m);

std::size_t rank(const QMatrix& m);

/// Nullspace basis as columns, one per free column of the echelon form,
/// normalized to 1 at its free column. Deterministic.
QMatrix nullspace(const QMatrix& m);

/// Column space basis: the pivot columns of m.
QMatrix column_basis(const QMatrix& m);

/// Orthonormal nullspace of a float matrix (SVD based).
Eigen::MatrixXd float_nullspace(const Eigen::MatrixXd& m, double tol = 1e-10);

}  // namespace lgo
